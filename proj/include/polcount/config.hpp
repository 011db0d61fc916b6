#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <polcount/pipeline.hpp>

namespace polcount {

/// Raised for malformed, unknown or out-of-range configuration input.
/// The message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nominal cold-gas scenario used as the documented default for every key.
Scenario default_scenario();

/// Parse a scenario from a JSON document. Unknown keys are rejected with
/// their full dotted path; missing keys take the documented defaults. If
/// `defaulted_keys` is non-null it receives the paths that were filled in
/// (provenance echo).
Scenario scenario_from_json(const nlohmann::json& doc,
                            std::vector<std::string>* defaulted_keys = nullptr);

/// Emit a scenario with every key materialized (defaults and derived values
/// included), in config-file units (frequencies in Hz).
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Load + parse a config file. I/O failures raise std::runtime_error (not
/// ConfigError); parse and validation failures raise ConfigError with
/// line/key diagnostics.
Scenario load_scenario_file(const std::string& path,
                            std::vector<std::string>* defaulted_keys = nullptr);

/// Numeric leaves a sweep may target, as dotted config paths.
std::vector<std::string> sweep_parameter_paths();

/// Read/write a numeric leaf by path (config-file units). Unknown paths
/// raise ConfigError listing the valid paths. Writing refreshes derived
/// fields.
double get_numeric_field(const Scenario& scenario, const std::string& path);
void set_numeric_field(Scenario& scenario, const std::string& path, double value);

}  // namespace polcount
