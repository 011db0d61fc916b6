#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include <polcount/pipeline.hpp>

namespace polcount {

inline constexpr int kResultSchemaVersion = 1;

/// Machine-readable result document: embedded schema version, the fully
/// materialized config, derived quantities, exact and Monte Carlo confusion
/// matrices, efficiencies and warnings. Byte-deterministic for a fixed seed
/// and independent of the thread count (which is deliberately not recorded).
nlohmann::json result_to_json(const Scenario& scenario,
                              const ScenarioResult& result,
                              const std::vector<std::string>& defaulted_keys);

nlohmann::json sweep_to_json(const Scenario& scenario,
                             const std::string& parameter_path,
                             const std::vector<SweepPoint>& points);

nlohmann::json report_to_json(const std::vector<ReportRow>& rows);

/// Delimited per-trial records: trial,true_n,stored_m,detected,background,n_hat.
std::string records_to_csv(const std::vector<CountRecord>& records,
                           const std::vector<int>& classified);

}  // namespace polcount
