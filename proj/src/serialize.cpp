#include <polcount/serialize.hpp>

#include <stdexcept>

#include <polcount/config.hpp>

namespace polcount {

namespace {

nlohmann::json matrix_rows(const ConfusionMatrix& matrix) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i <= matrix.n_top; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j <= matrix.n_top; ++j) {
      row.push_back(matrix.at(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json warnings_to_json(const WarningLog& warnings) {
  nlohmann::json out = nlohmann::json::array();
  for (const Warning& w : warnings) {
    out.push_back({{"code", w.code}, {"message", w.message}});
  }
  return out;
}

}  // namespace

nlohmann::json result_to_json(const Scenario& scenario,
                              const ScenarioResult& result,
                              const std::vector<std::string>& defaulted_keys) {
  nlohmann::json doc;
  doc["schema_version"] = kResultSchemaVersion;
  doc["config"] = scenario_to_json(scenario);
  doc["defaults_applied"] = defaulted_keys;

  doc["storage"] = {
      {"mixing_angle_initial_rad", result.storage.mixing_angle_initial},
      {"optical_depth", result.storage.optical_depth},
      {"transparency_bandwidth_rad_per_s", result.storage.transparency_bandwidth},
      {"group_velocity_m_per_s", result.storage.group_velocity},
      {"compressed_length_m", result.storage.compressed_length},
      {"adiabaticity_margin", result.storage.adiabaticity_margin},
      {"eta_bandwidth", result.storage.eta_bandwidth},
      {"eta_fit", result.storage.eta_fit},
      {"eta_adiabatic", result.storage.eta_adiabatic},
      {"eta_storage", result.storage.eta_storage},
      {"eta_store_used", result.eta_store_used},
  };

  doc["readout"] = {
      {"mu1", result.channel.mu1},
      {"off_resonant_ratio", result.off_ratio},
      {"max_ground_atoms", result.max_ground_atoms},
      {"background_mean", result.background_mean},
  };

  doc["estimator"] = {
      {"n_top", result.channel.n_top},
      {"thresholds", result.thresholds},
      {"n_max_exact", result.n_max_exact},
      {"n_max_heuristic", result.n_max_heuristic},
      {"error_budget", scenario.estimator.error_budget},
  };

  doc["exact_confusion"] = matrix_rows(result.exact);

  nlohmann::json mc;
  mc["row_trials"] = result.mc.row_trials;
  mc["overflow_trials"] = result.mc.overflow_trials;
  nlohmann::json counts = nlohmann::json::array();
  nlohmann::json prob = nlohmann::json::array();
  nlohmann::json se = nlohmann::json::array();
  for (int i = 0; i <= result.mc.n_top; ++i) {
    nlohmann::json counts_row = nlohmann::json::array();
    nlohmann::json prob_row = nlohmann::json::array();
    nlohmann::json se_row = nlohmann::json::array();
    for (int j = 0; j <= result.mc.n_top; ++j) {
      counts_row.push_back(
          result.mc.counts[static_cast<std::size_t>(i) * (result.mc.n_top + 1) + j]);
      prob_row.push_back(result.mc.probability(i, j));
      se_row.push_back(result.mc.standard_error(i, j));
    }
    counts.push_back(std::move(counts_row));
    prob.push_back(std::move(prob_row));
    se.push_back(std::move(se_row));
  }
  mc["counts"] = std::move(counts);
  mc["probability"] = std::move(prob);
  mc["standard_error"] = std::move(se);
  doc["mc_confusion"] = std::move(mc);

  doc["efficiency"] = {
      {"exact", result.efficiency_exact},
      {"mc", result.efficiency_mc},
      {"mc_standard_error", result.efficiency_mc_se},
      {"self_consistent", result.self_consistent()},
  };

  doc["warnings"] = warnings_to_json(result.warnings);
  doc["trials"] = result.trials;
  doc["seed"] = result.seed;
  return doc;
}

nlohmann::json sweep_to_json(const Scenario& scenario,
                             const std::string& parameter_path,
                             const std::vector<SweepPoint>& points) {
  nlohmann::json doc;
  doc["schema_version"] = kResultSchemaVersion;
  doc["config"] = scenario_to_json(scenario);
  doc["parameter"] = parameter_path;
  nlohmann::json out = nlohmann::json::array();
  for (const SweepPoint& p : points) {
    out.push_back({
        {"value", p.value},
        {"mu1", p.mu1},
        {"eta_store", p.eta_store},
        {"background_mean", p.background_mean},
        {"n_max_exact", p.n_max_exact},
        {"efficiency_exact", p.efficiency_exact},
        {"efficiency_mc", p.efficiency_mc},
    });
  }
  doc["points"] = std::move(out);
  return doc;
}

nlohmann::json report_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json doc;
  doc["schema_version"] = kResultSchemaVersion;
  nlohmann::json out = nlohmann::json::array();
  for (const ReportRow& row : rows) {
    nlohmann::json entry = {
        {"id", row.id},           {"label", row.label},
        {"quoted", row.quoted},   {"formula_value", row.formula_value},
        {"note", row.note},       {"inconsistent", row.inconsistent},
    };
    if (row.simulated_value) {
      entry["simulated_value"] = *row.simulated_value;
    } else {
      entry["simulated_value"] = nullptr;
    }
    out.push_back(std::move(entry));
  }
  doc["rows"] = std::move(out);
  return doc;
}

std::string records_to_csv(const std::vector<CountRecord>& records,
                           const std::vector<int>& classified) {
  if (records.size() != classified.size()) {
    throw std::invalid_argument("records_to_csv: size mismatch");
  }
  std::string out = "trial,true_n,stored_m,detected_counts,background_counts,n_hat\n";
  char line[160];
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%lld,%lld,%lld,%lld,%d\n", i,
                  records[i].true_n, records[i].stored_m,
                  records[i].detected_counts, records[i].background_counts,
                  classified[i]);
    out += line;
  }
  return out;
}

}  // namespace polcount
