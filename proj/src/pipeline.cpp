#include <polcount/pipeline.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include <polcount/config.hpp>
#include <polcount/constants.hpp>
#include <polcount/math_util.hpp>

namespace polcount {

void Scenario::refresh_derived() {
  if (species.sigma_derived) {
    species.sigma_abs = AtomicSpecies::default_cross_section(species.wavelength);
  }
  if (ensemble.g_derived) {
    ensemble.g_single =
        EnsembleConfig::default_coupling(species, ensemble.area, ensemble.length);
  }
  if (pulse.bandwidth_derived) {
    pulse.bandwidth = kTwoPi * kGaussianTimeBandwidthFwhm / pulse.duration;
  }
}

void Scenario::validate() const {
  species.validate();
  ensemble.validate();
  ramp.validate();
  pulse.validate();
  readout.validate();
  if (!(estimator.error_budget > 0.0 && estimator.error_budget < 0.5)) {
    throw std::invalid_argument("estimator.error_budget must be in (0, 0.5)");
  }
  if (estimator.n_top < 0) {
    throw std::invalid_argument("estimator.n_top must be >= 0 (0 = auto)");
  }
  if (eta_store_override &&
      !(*eta_store_override >= 0.0 && *eta_store_override <= 1.0)) {
    throw std::invalid_argument("eta_store_override must be in [0, 1]");
  }
  if (trials < 1) {
    throw std::invalid_argument("trials must be >= 1");
  }
}

double McConfusion::probability(int i, int j) const {
  const long long row = row_trials[static_cast<std::size_t>(i)];
  if (row == 0) {
    return 0.0;
  }
  return static_cast<double>(counts[static_cast<std::size_t>(i) * (n_top + 1) + j]) /
         static_cast<double>(row);
}

double McConfusion::standard_error(int i, int j) const {
  const long long row = row_trials[static_cast<std::size_t>(i)];
  if (row == 0) {
    return 0.0;
  }
  const double p = probability(i, j);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(row));
}

bool ScenarioResult::self_consistent() const {
  return std::fabs(efficiency_exact - efficiency_mc) <=
         3.0 * efficiency_mc_se + 1e-9;
}

namespace {

// Classification success probability including storage thinning:
// sum_n P_in(n) sum_m Binomial(m; n, eta) P(n_hat = n | stored m).
double efficiency_with_storage(const ConfusionMatrix& exact,
                               const PhotonNumberDistribution& input,
                               double eta_store) {
  const int n_top = exact.n_top;
  long double total = 0.0L;
  const long long support_top =
      std::min<long long>(n_top, input.upper_quantile(1e-15));
  for (long long n = 0; n <= support_top; ++n) {
    const double weight = input.pmf(n);
    if (weight == 0.0) {
      continue;
    }
    long double correct = 0.0L;
    for (long long m = 0; m <= n; ++m) {
      double binom;
      if (eta_store == 1.0) {
        binom = (m == n) ? 1.0 : 0.0;
      } else if (eta_store == 0.0) {
        binom = (m == 0) ? 1.0 : 0.0;
      } else {
        const double log_binom = log_factorial(n) - log_factorial(m) -
                                 log_factorial(n - m) +
                                 static_cast<double>(m) * std::log(eta_store) +
                                 static_cast<double>(n - m) * std::log1p(-eta_store);
        binom = std::exp(log_binom);
      }
      if (binom != 0.0) {
        correct += static_cast<long double>(binom) *
                   exact.at(static_cast<int>(m), static_cast<int>(n));
      }
    }
    total += static_cast<long double>(weight) * correct;
  }
  return static_cast<double>(total);
}

int resolve_n_top(const Scenario& s, double mu1, double bg) {
  if (s.estimator.n_top > 0) {
    return s.estimator.n_top;
  }
  const int sized = default_n_top(mu1, bg, s.estimator.error_budget);
  const long long support =
      s.pulse.statistics.upper_quantile(1e-9) + 5;
  return static_cast<int>(std::min<long long>(
      std::max<long long>(sized, support), 400));
}

struct McPartial {
  std::vector<long long> counts;
  std::vector<long long> row_trials;
  long long overflow = 0;
  long long correct = 0;
};

}  // namespace

Analysis analyze_scenario(const Scenario& scenario) {
  scenario.validate();

  Analysis analysis;
  analysis.storage = build_storage_report(scenario.species, scenario.ensemble,
                                          scenario.ramp, scenario.pulse,
                                          &analysis.warnings);
  analysis.eta_store_used =
      scenario.eta_store_override.value_or(analysis.storage.eta_storage);
  analysis.off_ratio = off_resonant_ratio(scenario.species, &analysis.warnings);
  analysis.max_ground_atoms = 1.0 / analysis.off_ratio;
  if (scenario.readout.measure_time > 1.0 / scenario.species.gamma_mg) {
    warn(&analysis.warnings, "measure_window_exceeds_dephasing",
         "measurement window is longer than the ground-state coherence time "
         "1/gamma_mg");
  }

  const double mu1 = mean_signal_per_excitation(scenario.readout);
  if (!(mu1 > 0.0)) {
    throw std::invalid_argument(
        "scenario yields zero detected counts per excitation; increase "
        "eta_s, scatter_rate or measure_time");
  }
  analysis.background_mean =
      mean_background_counts(scenario.readout, analysis.off_ratio);

  const int n_top = resolve_n_top(scenario, mu1, analysis.background_mean);
  analysis.channel = PoissonChannel{mu1, analysis.background_mean, n_top};
  analysis.n_max_exact =
      max_countable_n(analysis.channel, scenario.estimator.error_budget);
  analysis.n_max_heuristic = mu1;
  return analysis;
}

ScenarioResult run_scenario(const Scenario& scenario, int n_threads) {
  const Analysis analysis = analyze_scenario(scenario);

  ScenarioResult result;
  result.trials = scenario.trials;
  result.seed = scenario.seed;
  result.storage = analysis.storage;
  result.eta_store_used = analysis.eta_store_used;
  result.off_ratio = analysis.off_ratio;
  result.max_ground_atoms = analysis.max_ground_atoms;
  result.background_mean = analysis.background_mean;
  result.channel = analysis.channel;
  result.n_max_exact = analysis.n_max_exact;
  result.n_max_heuristic = analysis.n_max_heuristic;
  result.warnings = analysis.warnings;

  const int n_top = result.channel.n_top;
  result.thresholds = decision_thresholds(result.channel);
  result.exact = confusion_matrix(result.channel);
  result.efficiency_exact = efficiency_with_storage(
      result.exact, scenario.pulse.statistics, result.eta_store_used);

  // Monte Carlo pass on counter-based per-trial streams; integer-only
  // accumulation keeps the outcome independent of thread scheduling.
  const ReadoutScenario mc_scenario{scenario.pulse, result.eta_store_used,
                                    scenario.readout, result.off_ratio};
  const int threads =
      std::clamp(scenario.trials < 2048 ? 1 : n_threads, 1, 256);
  const std::size_t cells = static_cast<std::size_t>(n_top + 1) * (n_top + 1);
  std::vector<McPartial> partials(static_cast<std::size_t>(threads));
  const auto worker = [&](int t, long long begin, long long end) {
    McPartial& part = partials[static_cast<std::size_t>(t)];
    part.counts.assign(cells, 0);
    part.row_trials.assign(static_cast<std::size_t>(n_top) + 1, 0);
    for (long long i = begin; i < end; ++i) {
      TrialRng rng = TrialRng::for_trial(scenario.seed, static_cast<std::uint64_t>(i));
      const CountRecord record = simulate_trial(mc_scenario, rng);
      const int n_hat =
          classify_with_thresholds(record.detected_counts, result.thresholds);
      if (record.true_n > n_top) {
        ++part.overflow;
      } else {
        const std::size_t row = static_cast<std::size_t>(record.true_n);
        ++part.row_trials[row];
        ++part.counts[row * (n_top + 1) + static_cast<std::size_t>(n_hat)];
        if (record.true_n == n_hat) {
          ++part.correct;
        }
      }
    }
  };

  if (threads == 1) {
    worker(0, 0, scenario.trials);
  } else {
    std::vector<std::thread> pool;
    const long long chunk = (scenario.trials + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const long long begin = t * chunk;
      const long long end = std::min(scenario.trials, begin + chunk);
      if (begin >= end) {
        partials[static_cast<std::size_t>(t)].counts.assign(cells, 0);
        partials[static_cast<std::size_t>(t)].row_trials.assign(
            static_cast<std::size_t>(n_top) + 1, 0);
        continue;
      }
      pool.emplace_back(worker, t, begin, end);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  result.mc.n_top = n_top;
  result.mc.counts.assign(cells, 0);
  result.mc.row_trials.assign(static_cast<std::size_t>(n_top) + 1, 0);
  long long correct = 0;
  for (const McPartial& part : partials) {
    if (part.counts.empty()) {
      continue;
    }
    for (std::size_t c = 0; c < cells; ++c) {
      result.mc.counts[c] += part.counts[c];
    }
    for (std::size_t r = 0; r <= static_cast<std::size_t>(n_top); ++r) {
      result.mc.row_trials[r] += part.row_trials[r];
    }
    result.mc.overflow_trials += part.overflow;
    correct += part.correct;
  }

  result.efficiency_mc =
      static_cast<double>(correct) / static_cast<double>(scenario.trials);
  result.efficiency_mc_se =
      std::sqrt(result.efficiency_mc * (1.0 - result.efficiency_mc) /
                static_cast<double>(scenario.trials));
  return result;
}

std::vector<SweepPoint> sweep(const Scenario& scenario,
                              const std::string& parameter_path,
                              const std::vector<double>& values, int n_threads) {
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    Scenario staged = scenario;
    set_numeric_field(staged, parameter_path, values[i]);
    staged.seed = derive_stream_seed(scenario.seed, kDomainSweep,
                                     static_cast<std::uint64_t>(i));
    const ScenarioResult r = run_scenario(staged, n_threads);
    SweepPoint point;
    point.value = values[i];
    point.mu1 = r.channel.mu1;
    point.eta_store = r.eta_store_used;
    point.background_mean = r.background_mean;
    point.n_max_exact = r.n_max_exact;
    point.efficiency_exact = r.efficiency_exact;
    point.efficiency_mc = r.efficiency_mc;
    points.push_back(point);
  }
  return points;
}

namespace {

std::string format_value(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

}  // namespace

std::vector<ReportRow> reference_report(std::uint64_t seed) {
  const Scenario nominal = default_scenario();
  std::vector<ReportRow> rows;

  {  // cold-gas optical depth
    ReportRow row;
    row.id = "optical_depth";
    row.label = "optical depth alpha (N=1e5, 780 nm, 50 um beam radius)";
    row.quoted = ">> 1";
    row.formula_value = optical_depth(nominal.species, nominal.ensemble);
    row.note = "beam spec read as 50 um radius; a 100 um radius gives alpha/4";
    rows.push_back(row);
  }

  ReadoutSpec quoted_window;
  quoted_window.scatter_rate = 1e7;  // 100 ns scattering time
  quoted_window.eta_s = 0.01;
  quoted_window.measure_time = 1e-6;
  quoted_window.leak_prob = 0.0;
  quoted_window.n_ground = 0.0;
  quoted_window.detector_dark_rate = 0.0;

  {  // quoted counts in a 1 us window
    ReportRow row;
    row.id = "signal_quoted_window";
    row.label = "counts per excitation (R_s=1e7/s, eta_s=1%, T=1 us)";
    row.quoted = "100";
    row.formula_value = mean_signal_per_excitation(quoted_window);
    TrialRng rng(derive_stream_seed(seed, kDomainReport, 1));
    long long total = 0;
    const long long trials = 100000;
    for (long long i = 0; i < trials; ++i) {
      total += sample_excitation_counts(quoted_window, rng);
    }
    row.simulated_value = static_cast<double>(total) / static_cast<double>(trials);
    row.inconsistent = true;
    row.note = "quoted 100 counts in 1 us conflicts with eta_s*R_s*T = 0.1";
    rows.push_back(row);
  }

  ReadoutSpec coherence_window = quoted_window;
  coherence_window.measure_time = 1e-3;

  {  // same rates over the coherence-limited window
    ReportRow row;
    row.id = "signal_coherence_window";
    row.label = "counts per excitation (same rates, T=1 ms)";
    row.quoted = "-";
    row.formula_value = mean_signal_per_excitation(coherence_window);
    TrialRng rng(derive_stream_seed(seed, kDomainReport, 2));
    long long total = 0;
    const long long trials = 20000;
    for (long long i = 0; i < trials; ++i) {
      total += sample_excitation_counts(coherence_window, rng);
    }
    row.simulated_value = static_cast<double>(total) / static_cast<double>(trials);
    row.note = "1 ms window restores the quoted 100 counts per excitation";
    rows.push_back(row);
  }

  const double mu1_ms = mean_signal_per_excitation(coherence_window);

  {  // heuristic countable-n bound
    ReportRow row;
    row.id = "n_max_heuristic";
    row.label = "countable-n bound, occupancy heuristic (= mu1)";
    row.quoted = "100";
    row.formula_value = mu1_ms;
    row.note = "states must have small occupancy compared to this";
    rows.push_back(row);
  }

  {  // exact error-budgeted countable n
    ReportRow row;
    row.id = "n_max_exact";
    row.label = "countable n at 1% per-state error (mu1=100, bg=0)";
    row.quoted = "<< 100";
    const PoissonChannel channel{mu1_ms, 0.0, default_n_top(mu1_ms, 0.0, 0.01)};
    row.formula_value = max_countable_n(channel, 0.01);
    row.note = "exact Poisson confusion-matrix value";
    rows.push_back(row);
  }

  {  // warm-gas ground-state atom ceiling
    ReportRow row;
    row.id = "max_ground_atoms";
    row.label = "max ground-state atoms N_max (Doppler-free)";
    row.quoted = "~1e6";
    row.formula_value = max_ground_atoms(nominal.species);
    row.note = "background equals one excitation's signal at this N";
    rows.push_back(row);
  }

  {  // end-to-end counting efficiency at 10% detection efficiency
    ReportRow row;
    row.id = "counting_efficiency";
    row.label = "counting efficiency (eta_s=10%, T=1 ms, fock n<=5)";
    row.quoted = "approaching 100%";

    Scenario scenario = nominal;
    scenario.readout.eta_s = 0.1;
    scenario.readout.measure_time = 1e-3;
    scenario.readout.n_ground = 1e5;
    scenario.eta_store_override = 1.0;
    const double ratio = off_resonant_ratio(scenario.species);
    const double mu1 = mean_signal_per_excitation(scenario.readout);
    const double bg = mean_background_counts(scenario.readout, ratio);
    const PoissonChannel channel{mu1, bg, default_n_top(mu1, bg, 0.01)};
    const ConfusionMatrix exact = confusion_matrix(channel);
    long double avg = 0.0L;
    for (int n = 0; n <= 5; ++n) {
      avg += exact.diagonal(n);
    }
    row.formula_value = static_cast<double>(avg / 6.0L);

    const auto thresholds = decision_thresholds(channel);
    TrialRng rng(derive_stream_seed(seed, kDomainReport, 3));
    long long correct = 0;
    const long long per_state = 2000;
    for (int n = 0; n <= 5; ++n) {
      ReadoutScenario mc;
      mc.pulse = scenario.pulse;
      mc.pulse.statistics =
          PhotonNumberDistribution{PhotonStatistics::fock, static_cast<double>(n)};
      mc.eta_store = 1.0;
      mc.spec = scenario.readout;
      mc.off_ratio = ratio;
      for (long long i = 0; i < per_state; ++i) {
        const CountRecord record = simulate_trial(mc, rng);
        if (classify_with_thresholds(record.detected_counts, thresholds) == n) {
          ++correct;
        }
      }
    }
    row.simulated_value =
        static_cast<double>(correct) / static_cast<double>(6 * per_state);
    row.note = "mean over fock states 0..5, background from 1e5 ground atoms";
    rows.push_back(row);
  }

  return rows;
}

std::string render_report_table(const std::vector<ReportRow>& rows) {
  std::string out;
  out += "reference-claims report: quoted desk numbers vs computed values\n";
  out +=
      "--------------------------------------------------------------------"
      "--------------\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-54s %-16s %-10s %-10s\n", "quantity",
                "quoted", "formula", "simulated");
  out += line;
  out +=
      "--------------------------------------------------------------------"
      "--------------\n";
  for (const ReportRow& row : rows) {
    const std::string simulated =
        row.simulated_value ? format_value(*row.simulated_value) : "-";
    std::snprintf(line, sizeof(line), "%-54s %-16s %-10s %-10s%s\n",
                  row.label.c_str(), row.quoted.c_str(),
                  format_value(row.formula_value).c_str(), simulated.c_str(),
                  row.inconsistent ? " INCONSISTENT" : "");
    out += line;
    std::snprintf(line, sizeof(line), "    note: %s\n", row.note.c_str());
    out += line;
  }
  return out;
}

}  // namespace polcount
