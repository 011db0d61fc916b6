#include <polcount/readout.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <polcount/math_util.hpp>

namespace polcount {

namespace {

void require(bool ok, const char* message) {
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

}  // namespace

void ReadoutSpec::validate() const {
  require(std::isfinite(scatter_rate) && scatter_rate >= 0.0,
          "readout.scatter_rate must be >= 0");
  require(std::isfinite(eta_s) && eta_s >= 0.0 && eta_s <= 1.0,
          "readout.eta_s must be in [0, 1]");
  require(std::isfinite(measure_time) && measure_time > 0.0,
          "readout.measure_time must be > 0");
  require(std::isfinite(leak_prob) && leak_prob >= 0.0 && leak_prob < 1.0,
          "readout.leak_prob must be in [0, 1)");
  require(std::isfinite(n_ground) && n_ground >= 0.0,
          "readout.n_ground must be >= 0");
  require(std::isfinite(detector_dark_rate) && detector_dark_rate >= 0.0,
          "readout.detector_dark_rate must be >= 0");
}

double mean_signal_per_excitation(const ReadoutSpec& spec) {
  spec.validate();
  const double window_mean = spec.scatter_rate * spec.measure_time;
  if (spec.leak_prob == 0.0 || window_mean == 0.0) {
    return spec.eta_s * window_mean;
  }
  // E[min(G, N)] = sum_{k>=1} (1-p)^(k-1) P(N >= k), N ~ Poisson(window_mean).
  // P(N >= k) = 1 to ~1e-50 for k below mean - 15 sd; that head of the
  // series is summed in closed form, the remainder by pmf recursion.
  const long double p = spec.leak_prob;
  const long double q = 1.0L - p;
  const long double mu = window_mean;
  const long long k0 = std::max<long long>(
      1, static_cast<long long>(window_mean - 15.0 * std::sqrt(window_mean) - 10.0));

  long double sum = 0.0L;
  if (k0 > 1) {
    // sum_{k=1}^{k0-1} q^(k-1) = (1 - q^(k0-1)) / p
    sum = -expm1l(static_cast<long double>(k0 - 1) * log1pl(-p)) / p;
  }
  long double geom = expl(static_cast<long double>(k0 - 1) * log1pl(-p));
  long double tail = (k0 == 1) ? -expm1l(-mu) : 1.0L;  // P(N >= k0)
  long double pmf = expl(poisson_log_pmf(k0, window_mean));  // P(N = k0)
  const long long k_cap = static_cast<long long>(
      window_mean + 12.0 * std::sqrt(window_mean) + 1000.0);
  for (long long k = k0; k <= k_cap; ++k) {
    sum += geom * tail;
    geom *= q;
    // remaining terms are bounded by geom * E[N]
    if (geom * mu < 1e-14L * (sum + 1e-300L)) {
      break;
    }
    tail -= pmf;
    if (tail < 0.0L) {
      tail = 0.0L;
    }
    pmf *= mu / static_cast<long double>(k + 1);
  }
  return spec.eta_s * static_cast<double>(sum);
}

double off_resonant_ratio(const AtomicSpecies& species, WarningLog* log) {
  species.validate();
  if (species.hyperfine_splitting < 10.0 * species.gamma_e) {
    warn(log, "wing_approximation_invalid",
         "hyperfine splitting below 10 linewidths: far-wing scattering "
         "ratio is unreliable");
  }
  const double x = species.gamma_e / (2.0 * species.hyperfine_splitting);
  return x * x;
}

double max_ground_atoms(const AtomicSpecies& species) {
  return 1.0 / off_resonant_ratio(species);
}

double mean_background_counts(const ReadoutSpec& spec, double off_ratio) {
  spec.validate();
  require(std::isfinite(off_ratio) && off_ratio >= 0.0,
          "mean_background_counts: off_ratio must be >= 0");
  const double rate = spec.n_ground * off_ratio * spec.scatter_rate * spec.eta_s +
                      spec.detector_dark_rate;
  return rate * spec.measure_time;
}

long long sample_excitation_counts(const ReadoutSpec& spec, TrialRng& rng) {
  const double window_mean = spec.scatter_rate * spec.measure_time;
  if (spec.leak_prob == 0.0) {
    // Binomial(Poisson(window_mean), eta_s) == Poisson(eta_s * window_mean)
    return rng.poisson(spec.eta_s * window_mean);
  }
  const long long window_events = rng.poisson(window_mean);
  const long long cycling_events = rng.geometric(spec.leak_prob);
  return rng.binomial(std::min(window_events, cycling_events), spec.eta_s);
}

void ReadoutScenario::validate() const {
  pulse.validate();
  spec.validate();
  require(std::isfinite(eta_store) && eta_store >= 0.0 && eta_store <= 1.0,
          "eta_store must be in [0, 1]");
  require(std::isfinite(off_ratio) && off_ratio >= 0.0,
          "off_ratio must be >= 0");
}

CountRecord simulate_trial(const ReadoutScenario& scenario, TrialRng& rng) {
  CountRecord record;
  record.true_n = sample_photon_number(scenario.pulse, rng);
  record.stored_m = rng.binomial(record.true_n, scenario.eta_store);
  long long signal = 0;
  for (long long i = 0; i < record.stored_m; ++i) {
    signal += sample_excitation_counts(scenario.spec, rng);
  }
  record.background_counts =
      rng.poisson(mean_background_counts(scenario.spec, scenario.off_ratio));
  record.detected_counts = signal + record.background_counts;
  return record;
}

std::vector<CountRecord> run_trials(long long n_trials,
                                    const ReadoutScenario& scenario,
                                    std::uint64_t seed, int n_threads) {
  require(n_trials >= 1, "run_trials: n_trials must be >= 1");
  scenario.validate();

  std::vector<CountRecord> records(static_cast<std::size_t>(n_trials));
  const auto worker = [&](long long begin, long long end) {
    for (long long i = begin; i < end; ++i) {
      TrialRng rng = TrialRng::for_trial(seed, static_cast<std::uint64_t>(i));
      records[static_cast<std::size_t>(i)] = simulate_trial(scenario, rng);
    }
  };

  const int threads = std::clamp(n_threads, 1, 256);
  if (threads == 1 || n_trials < 2048) {
    worker(0, n_trials);
    return records;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const long long chunk = (n_trials + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const long long begin = t * chunk;
    const long long end = std::min(n_trials, begin + chunk);
    if (begin >= end) {
      break;
    }
    pool.emplace_back(worker, begin, end);
  }
  for (auto& th : pool) {
    th.join();
  }
  return records;
}

}  // namespace polcount
