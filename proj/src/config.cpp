#include <polcount/config.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <polcount/constants.hpp>

namespace polcount {

namespace {

// One numeric (double) scenario leaf. `scale` converts the config-file value
// to the internal representation (2*pi for keys quoted in Hz); setters on
// derivable fields also clear the corresponding derived flag.
struct NumericField {
  const char* path;
  double scale;
  double (*get)(const Scenario&);
  void (*set)(Scenario&, double);
  const char* doc;
};

const NumericField kNumericFields[] = {
    {"species.gamma_e_hz", kTwoPi,
     [](const Scenario& s) { return s.species.gamma_e; },
     [](Scenario& s, double v) { s.species.gamma_e = v; },
     "excited-state spontaneous emission rate / 2pi"},
    {"species.wavelength_m", 1.0,
     [](const Scenario& s) { return s.species.wavelength; },
     [](Scenario& s, double v) { s.species.wavelength = v; },
     "probe transition wavelength"},
    {"species.sigma_abs_m2", 1.0,
     [](const Scenario& s) { return s.species.sigma_abs; },
     [](Scenario& s, double v) {
       s.species.sigma_abs = v;
       s.species.sigma_derived = false;
     },
     "resonant absorption cross-section (default 3*lambda^2/(2*pi))"},
    {"species.hyperfine_splitting_hz", kTwoPi,
     [](const Scenario& s) { return s.species.hyperfine_splitting; },
     [](Scenario& s, double v) { s.species.hyperfine_splitting = v; },
     "ground-state hyperfine splitting / 2pi"},
    {"species.gamma_mg_per_s", 1.0,
     [](const Scenario& s) { return s.species.gamma_mg; },
     [](Scenario& s, double v) { s.species.gamma_mg = v; },
     "collective ground-state coherence dephasing rate"},
    {"ensemble.n_atoms", 1.0,
     [](const Scenario& s) { return s.ensemble.n_atoms; },
     [](Scenario& s, double v) { s.ensemble.n_atoms = v; },
     "total atom count"},
    {"ensemble.area_m2", 1.0,
     [](const Scenario& s) { return s.ensemble.area; },
     [](Scenario& s, double v) { s.ensemble.area = v; },
     "probe cross-sectional area"},
    {"ensemble.length_m", 1.0,
     [](const Scenario& s) { return s.ensemble.length; },
     [](Scenario& s, double v) { s.ensemble.length = v; },
     "medium length"},
    {"ensemble.g_single_hz", kTwoPi,
     [](const Scenario& s) { return s.ensemble.g_single; },
     [](Scenario& s, double v) {
       s.ensemble.g_single = v;
       s.ensemble.g_derived = false;
     },
     "single atom-field coupling / 2pi (default from geometry)"},
    {"ramp.omega_c_max_hz", kTwoPi,
     [](const Scenario& s) { return s.ramp.omega_c_max; },
     [](Scenario& s, double v) { s.ramp.omega_c_max = v; },
     "peak coupling Rabi frequency / 2pi"},
    {"ramp.switch_time_s", 1.0,
     [](const Scenario& s) { return s.ramp.switch_time; },
     [](Scenario& s, double v) { s.ramp.switch_time = v; },
     "10%-to-90% coupling turn-off duration"},
    {"pulse.duration_s", 1.0,
     [](const Scenario& s) { return s.pulse.duration; },
     [](Scenario& s, double v) { s.pulse.duration = v; },
     "probe intensity FWHM"},
    {"pulse.bandwidth_hz", kTwoPi,
     [](const Scenario& s) { return s.pulse.bandwidth; },
     [](Scenario& s, double v) {
       s.pulse.bandwidth = v;
       s.pulse.bandwidth_derived = false;
     },
     "probe spectral FWHM / 2pi (default transform-limited)"},
    {"pulse.photon_number", 1.0,
     [](const Scenario& s) { return s.pulse.statistics.value; },
     [](Scenario& s, double v) { s.pulse.statistics.value = v; },
     "fock n, or mean nbar for coherent/thermal"},
    {"readout.scatter_rate_per_s", 1.0,
     [](const Scenario& s) { return s.readout.scatter_rate; },
     [](Scenario& s, double v) { s.readout.scatter_rate = v; },
     "single-atom resonant scattering rate"},
    {"readout.eta_s", 1.0,
     [](const Scenario& s) { return s.readout.eta_s; },
     [](Scenario& s, double v) { s.readout.eta_s = v; },
     "photon collection x detection efficiency"},
    {"readout.measure_time_s", 1.0,
     [](const Scenario& s) { return s.readout.measure_time; },
     [](Scenario& s, double v) { s.readout.measure_time = v; },
     "fluorescence measurement window"},
    {"readout.leak_prob", 1.0,
     [](const Scenario& s) { return s.readout.leak_prob; },
     [](Scenario& s, double v) { s.readout.leak_prob = v; },
     "per-scattering-event cycling-transition leak probability"},
    {"readout.n_ground", 1.0,
     [](const Scenario& s) { return s.readout.n_ground; },
     [](Scenario& s, double v) { s.readout.n_ground = v; },
     "ground-state atoms exposed to the detection laser"},
    {"readout.detector_dark_rate_per_s", 1.0,
     [](const Scenario& s) { return s.readout.detector_dark_rate; },
     [](Scenario& s, double v) { s.readout.detector_dark_rate = v; },
     "intrinsic detector background rate"},
    {"estimator.error_budget", 1.0,
     [](const Scenario& s) { return s.estimator.error_budget; },
     [](Scenario& s, double v) { s.estimator.error_budget = v; },
     "per-state misclassification budget for n_max"},
};

constexpr const char* kShapePath = "ramp.shape";
constexpr const char* kStatisticsPath = "pulse.statistics";
constexpr const char* kEtaOverridePath = "storage.eta_store_override";
constexpr const char* kNTopPath = "estimator.n_top";
constexpr const char* kTrialsPath = "run.trials";
constexpr const char* kSeedPath = "run.seed";

std::set<std::string> known_paths() {
  std::set<std::string> paths;
  for (const NumericField& field : kNumericFields) {
    paths.insert(field.path);
  }
  paths.insert(kShapePath);
  paths.insert(kStatisticsPath);
  paths.insert(kEtaOverridePath);
  paths.insert(kNTopPath);
  paths.insert(kTrialsPath);
  paths.insert(kSeedPath);
  return paths;
}

void collect_leaf_paths(const nlohmann::json& node, const std::string& prefix,
                        std::vector<std::string>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      const std::string path = prefix.empty() ? key : prefix + "." + key;
      if (value.is_object()) {
        collect_leaf_paths(value, path, out);
      } else {
        out.push_back(path);
      }
    }
  }
}

const nlohmann::json* find_path(const nlohmann::json& doc, const std::string& path) {
  const nlohmann::json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      return nullptr;
    }
    node = &(*node)[part];
  }
  return node;
}

double require_number(const nlohmann::json& value, const std::string& path) {
  if (!value.is_number()) {
    throw ConfigError("config key '" + path + "' must be a number");
  }
  return value.get<double>();
}

std::string require_string(const nlohmann::json& value, const std::string& path) {
  if (!value.is_string()) {
    throw ConfigError("config key '" + path + "' must be a string");
  }
  return value.get<std::string>();
}

long long require_integer(const nlohmann::json& value, const std::string& path) {
  if (value.is_number_integer()) {
    return value.get<long long>();
  }
  if (value.is_number()) {
    const double v = value.get<double>();
    if (v == std::floor(v)) {
      return static_cast<long long>(v);
    }
  }
  throw ConfigError("config key '" + path + "' must be an integer");
}

}  // namespace

Scenario default_scenario() {
  Scenario s;

  s.species.gamma_e = kTwoPi * 6e6;
  s.species.wavelength = 780e-9;
  s.species.sigma_abs = AtomicSpecies::default_cross_section(s.species.wavelength);
  s.species.sigma_derived = true;
  s.species.hyperfine_splitting = kTwoPi * 6.8e9;
  s.species.gamma_mg = 1e3;  // 1 ms ground-state coherence time

  s.ensemble.n_atoms = 1e5;
  s.ensemble.area = kPi * 50e-6 * 50e-6;  // 50 um beam radius
  s.ensemble.length = 1e-3;
  s.ensemble.g_single =
      EnsembleConfig::default_coupling(s.species, s.ensemble.area, s.ensemble.length);
  s.ensemble.g_derived = true;

  s.ramp.omega_c_max = kTwoPi * 5e6;
  s.ramp.switch_time = 1e-6;
  s.ramp.shape = RampShape::linear;

  s.pulse = ProbePulse::transform_limited(
      1e-6, PhotonNumberDistribution{PhotonStatistics::fock, 1.0});

  s.readout.scatter_rate = 1e7;  // 100 ns scattering time
  s.readout.eta_s = 0.1;
  s.readout.measure_time = 1e-3;
  s.readout.leak_prob = 0.0;
  s.readout.n_ground = 1e5;
  s.readout.detector_dark_rate = 0.0;

  s.estimator.error_budget = 0.01;
  s.estimator.n_top = 0;

  s.eta_store_override.reset();
  s.trials = 10000;
  s.seed = 1;
  return s;
}

Scenario scenario_from_json(const nlohmann::json& doc,
                            std::vector<std::string>* defaulted_keys) {
  if (!doc.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }

  // reject unknown keys with their full dotted path
  const std::set<std::string> known = known_paths();
  std::vector<std::string> leaves;
  collect_leaf_paths(doc, "", leaves);
  for (const std::string& leaf : leaves) {
    if (known.find(leaf) == known.end()) {
      throw ConfigError("unknown config key '" + leaf + "'");
    }
  }

  Scenario s = default_scenario();
  std::vector<std::string> defaulted;

  for (const NumericField& field : kNumericFields) {
    if (const nlohmann::json* value = find_path(doc, field.path)) {
      field.set(s, require_number(*value, field.path) * field.scale);
    } else {
      defaulted.push_back(field.path);
    }
  }

  if (const nlohmann::json* value = find_path(doc, kShapePath)) {
    const std::string shape = require_string(*value, kShapePath);
    if (shape == "linear") {
      s.ramp.shape = RampShape::linear;
    } else if (shape == "raised-cosine") {
      s.ramp.shape = RampShape::raised_cosine;
    } else {
      throw ConfigError("config key 'ramp.shape' must be 'linear' or "
                        "'raised-cosine', got '" + shape + "'");
    }
  } else {
    defaulted.push_back(kShapePath);
  }

  if (const nlohmann::json* value = find_path(doc, kStatisticsPath)) {
    const std::string kind = require_string(*value, kStatisticsPath);
    if (kind == "fock") {
      s.pulse.statistics.kind = PhotonStatistics::fock;
    } else if (kind == "coherent") {
      s.pulse.statistics.kind = PhotonStatistics::coherent;
    } else if (kind == "thermal") {
      s.pulse.statistics.kind = PhotonStatistics::thermal;
    } else {
      throw ConfigError("config key 'pulse.statistics' must be 'fock', "
                        "'coherent' or 'thermal', got '" + kind + "'");
    }
  } else {
    defaulted.push_back(kStatisticsPath);
  }

  if (const nlohmann::json* value = find_path(doc, kEtaOverridePath)) {
    if (value->is_null()) {
      s.eta_store_override.reset();
    } else {
      s.eta_store_override = require_number(*value, kEtaOverridePath);
    }
  } else {
    defaulted.push_back(kEtaOverridePath);
  }

  if (const nlohmann::json* value = find_path(doc, kNTopPath)) {
    s.estimator.n_top = static_cast<int>(require_integer(*value, kNTopPath));
  } else {
    defaulted.push_back(kNTopPath);
  }

  if (const nlohmann::json* value = find_path(doc, kTrialsPath)) {
    s.trials = require_integer(*value, kTrialsPath);
  } else {
    defaulted.push_back(kTrialsPath);
  }

  if (const nlohmann::json* value = find_path(doc, kSeedPath)) {
    if (value->is_number_unsigned() || value->is_number_integer()) {
      s.seed = value->get<std::uint64_t>();
    } else {
      throw ConfigError("config key 'run.seed' must be a non-negative integer");
    }
  } else {
    defaulted.push_back(kSeedPath);
  }

  s.refresh_derived();
  try {
    s.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("invalid config value: ") + err.what());
  }

  if (defaulted_keys != nullptr) {
    *defaulted_keys = std::move(defaulted);
  }
  return s;
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
  nlohmann::json doc;
  for (const NumericField& field : kNumericFields) {
    const nlohmann::json value = field.get(scenario) / field.scale;
    std::stringstream ss(field.path);
    std::string section;
    std::string key;
    std::getline(ss, section, '.');
    std::getline(ss, key, '.');
    doc[section][key] = value;
  }
  doc["ramp"]["shape"] =
      scenario.ramp.shape == RampShape::linear ? "linear" : "raised-cosine";
  switch (scenario.pulse.statistics.kind) {
    case PhotonStatistics::fock:
      doc["pulse"]["statistics"] = "fock";
      break;
    case PhotonStatistics::coherent:
      doc["pulse"]["statistics"] = "coherent";
      break;
    case PhotonStatistics::thermal:
      doc["pulse"]["statistics"] = "thermal";
      break;
  }
  if (scenario.eta_store_override) {
    doc["storage"]["eta_store_override"] = *scenario.eta_store_override;
  } else {
    doc["storage"]["eta_store_override"] = nullptr;
  }
  doc["estimator"]["n_top"] = scenario.estimator.n_top;
  doc["run"]["trials"] = scenario.trials;
  doc["run"]["seed"] = scenario.seed;
  return doc;
}

Scenario load_scenario_file(const std::string& path,
                            std::vector<std::string>* defaulted_keys) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError("config file '" + path + "': " + err.what());
  }
  return scenario_from_json(doc, defaulted_keys);
}

std::vector<std::string> sweep_parameter_paths() {
  std::vector<std::string> paths;
  for (const NumericField& field : kNumericFields) {
    paths.push_back(field.path);
  }
  return paths;
}

namespace {

[[noreturn]] void unknown_path(const std::string& path) {
  std::string message = "unknown parameter path '" + path + "'; valid paths:";
  for (const NumericField& field : kNumericFields) {
    message += "\n  ";
    message += field.path;
  }
  throw ConfigError(message);
}

}  // namespace

double get_numeric_field(const Scenario& scenario, const std::string& path) {
  for (const NumericField& field : kNumericFields) {
    if (path == field.path) {
      return field.get(scenario) / field.scale;
    }
  }
  unknown_path(path);
}

void set_numeric_field(Scenario& scenario, const std::string& path, double value) {
  for (const NumericField& field : kNumericFields) {
    if (path == field.path) {
      field.set(scenario, value * field.scale);
      scenario.refresh_derived();
      return;
    }
  }
  unknown_path(path);
}

}  // namespace polcount
