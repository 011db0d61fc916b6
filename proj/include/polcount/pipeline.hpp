#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <polcount/estimator.hpp>
#include <polcount/polariton.hpp>
#include <polcount/readout.hpp>

namespace polcount {

struct EstimatorSettings {
  double error_budget = 0.01;  // per-state misclassification budget
  int n_top = 0;               // 0 = auto (spec'd sizing rule + input support)
};

/// Complete end-to-end scenario: storage -> readout -> estimation.
struct Scenario {
  AtomicSpecies species;
  EnsembleConfig ensemble;
  CouplingRamp ramp;
  ProbePulse pulse;
  ReadoutSpec readout;
  EstimatorSettings estimator;
  /// When set, replaces the physics-derived storage efficiency (the ideal
  /// 1-1 mapping is eta_store_override = 1).
  std::optional<double> eta_store_override;
  long long trials = 10000;
  std::uint64_t seed = 1;

  /// Recompute fields that were derived from others (sigma_abs, g_single,
  /// pulse bandwidth); called after a sweep edits a leaf.
  void refresh_derived();
  void validate() const;
};

/// Monte Carlo confusion-matrix estimate with per-entry standard errors.
struct McConfusion {
  int n_top = 0;
  std::vector<long long> counts;      // (n_top+1)^2 row-major; rows = true n
  std::vector<long long> row_trials;  // trials observed per true n
  long long overflow_trials = 0;      // trials whose true n exceeded n_top

  double probability(int i, int j) const;
  double standard_error(int i, int j) const;
};

/// Closed-form stage of a scenario: everything derivable without Monte Carlo.
struct Analysis {
  StorageReport storage;
  double eta_store_used;    // override if present, else storage.eta_storage
  double off_ratio;
  double max_ground_atoms;  // N_max for the species in use
  double background_mean;   // bg counts in the window
  PoissonChannel channel;   // (mu1, background_mean, resolved n_top)
  int n_max_exact;          // error-budgeted countable n
  double n_max_heuristic;   // mu1, the occupancy-must-stay-small bound
  WarningLog warnings;
};

/// Derived quantities only; no sampling.
Analysis analyze_scenario(const Scenario& scenario);

struct ScenarioResult {
  StorageReport storage;
  double eta_store_used;    // override if present, else storage.eta_storage
  double off_ratio;
  double max_ground_atoms;  // N_max for the species in use
  double background_mean;   // bg counts in the window
  PoissonChannel channel;   // (mu1, background_mean, resolved n_top)
  std::vector<long long> thresholds;
  ConfusionMatrix exact;
  McConfusion mc;
  int n_max_exact;          // error-budgeted countable n
  double n_max_heuristic;   // mu1, the occupancy-must-stay-small bound
  double efficiency_exact;  // includes storage thinning
  double efficiency_mc;
  double efficiency_mc_se;
  WarningLog warnings;
  long long trials = 0;
  std::uint64_t seed = 0;

  /// Exact and empirical efficiencies agree within 3 standard errors.
  bool self_consistent() const;
};

/// Run a full scenario. Deterministic given the seed; the thread count
/// changes scheduling only, never any result byte.
ScenarioResult run_scenario(const Scenario& scenario, int n_threads = 1);

/// One-line summary of a sweep point.
struct SweepPoint {
  double value;
  double mu1;
  double eta_store;
  double background_mean;
  int n_max_exact;
  double efficiency_exact;
  double efficiency_mc;
};

/// Evaluate the scenario with the named numeric leaf set to each value.
/// Point seeds are derived from (seed, value index) so points are
/// independent yet reproducible. Unknown paths are rejected with the list
/// of valid paths in the exception message.
std::vector<SweepPoint> sweep(const Scenario& scenario,
                              const std::string& parameter_path,
                              const std::vector<double>& values,
                              int n_threads = 1);

/// One row of the reference-claims report: a commonly quoted desk number
/// for this detection scheme next to the formula value and, where
/// meaningful, a simulated value.
struct ReportRow {
  std::string id;
  std::string label;
  std::string quoted;                     // the number as usually stated
  double formula_value;
  std::optional<double> simulated_value;
  std::string note;
  bool inconsistent = false;              // quoted value conflicts with the formula
};

inline constexpr std::uint64_t kDefaultReportSeed = 20020905;

/// Build the reference-claims report. Byte-deterministic for a fixed seed.
std::vector<ReportRow> reference_report(std::uint64_t seed = kDefaultReportSeed);

/// Fixed-width human rendering of the report rows.
std::string render_report_table(const std::vector<ReportRow>& rows);

}  // namespace polcount
