#include <polcount/estimator.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <polcount/math_util.hpp>
#include <polcount/readout.hpp>

namespace polcount {

namespace {

void require(bool ok, const char* message) {
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

// Log-likelihood of state mean mu for observed count k. A zero mean is a
// point mass at k == 0; IEEE -inf orders below every finite log-likelihood,
// which reproduces the intended argmax without a literal likelihood floor.
long double log_likelihood(long long k, double mu) {
  return poisson_log_pmf(k, mu);
}

// true iff the lower of two adjacent states keeps count k (ties included).
bool lower_state_keeps(long long k, double mu_lo, double mu_hi) {
  return log_likelihood(k, mu_lo) >= log_likelihood(k, mu_hi);
}

}  // namespace

void PoissonChannel::validate() const {
  require(std::isfinite(mu1) && mu1 > 0.0, "channel.mu1 must be > 0");
  require(std::isfinite(bg) && bg >= 0.0, "channel.bg must be >= 0");
  require(n_top >= 1, "channel.n_top must be >= 1");
}

double ConfusionMatrix::row_sum(int i) const {
  long double sum = 0.0L;
  for (int j = 0; j <= n_top; ++j) {
    sum += at(i, j);
  }
  return static_cast<double>(sum);
}

int classify(long long counts, const PoissonChannel& channel) {
  channel.validate();
  require(counts >= 0, "classify: counts must be >= 0");
  int best = 0;
  long double best_ll = log_likelihood(counts, channel.state_mean(0));
  for (int n = 1; n <= channel.n_top; ++n) {
    const long double ll = log_likelihood(counts, channel.state_mean(n));
    if (ll > best_ll) {  // strict: ties stay with the smaller n
      best = n;
      best_ll = ll;
    }
  }
  return best;
}

std::vector<long long> decision_thresholds(const PoissonChannel& channel) {
  channel.validate();
  std::vector<long long> bounds(static_cast<std::size_t>(channel.n_top));
  for (int n = 0; n < channel.n_top; ++n) {
    const double mu_lo = channel.state_mean(n);
    const double mu_hi = channel.state_mean(n + 1);
    long long k;
    if (mu_lo == 0.0) {
      k = 0;  // a zero-mean state owns only the zero count
    } else {
      // continuous crossover of the two likelihoods
      k = static_cast<long long>(std::floor(channel.mu1 / std::log(mu_hi / mu_lo)));
      if (k < 0) {
        k = 0;
      }
      // pin the integer boundary with the comparisons classify uses
      while (k > 0 && !lower_state_keeps(k, mu_lo, mu_hi)) {
        --k;
      }
      while (lower_state_keeps(k + 1, mu_lo, mu_hi)) {
        ++k;
      }
    }
    bounds[static_cast<std::size_t>(n)] = k;
  }
  return bounds;
}

int classify_with_thresholds(long long counts,
                             const std::vector<long long>& thresholds) {
  require(counts >= 0, "classify_with_thresholds: counts must be >= 0");
  const auto it = std::lower_bound(thresholds.begin(), thresholds.end(), counts);
  return static_cast<int>(it - thresholds.begin());
}

namespace {

// Exact decision-region masses for one state mean: sum the Poisson pmf
// outward from the mode until both tails fall below 1e-20 (total truncated
// mass well under the 1e-13 budget), assigning each term to its region.
std::vector<double> region_masses(double mu, const std::vector<long long>& bounds,
                                  int n_top) {
  std::vector<long double> acc(static_cast<std::size_t>(n_top) + 1, 0.0L);
  if (mu == 0.0) {
    acc[static_cast<std::size_t>(classify_with_thresholds(0, bounds))] = 1.0L;
  } else {
    constexpr long double kCutoff = 1e-20L;
    const long long mode = static_cast<long long>(mu);
    // upward sweep
    {
      long double pmf = expl(poisson_log_pmf(mode, mu));
      long long k = mode;
      int region = classify_with_thresholds(k, bounds);
      while (pmf > kCutoff || k <= mode + 2) {
        while (region < n_top && k > bounds[static_cast<std::size_t>(region)]) {
          ++region;
        }
        acc[static_cast<std::size_t>(region)] += pmf;
        ++k;
        pmf *= mu / static_cast<long double>(k);
      }
    }
    // downward sweep
    if (mode > 0) {
      long double pmf = expl(poisson_log_pmf(mode - 1, mu));
      long long k = mode - 1;
      int region = classify_with_thresholds(k, bounds);
      while (k >= 0 && (pmf > kCutoff || k >= mode - 2)) {
        while (region > 0 && k <= bounds[static_cast<std::size_t>(region) - 1]) {
          --region;
        }
        acc[static_cast<std::size_t>(region)] += pmf;
        --k;
        if (k >= 0) {
          pmf *= static_cast<long double>(k + 1) / mu;
        }
      }
    }
  }
  std::vector<double> out(acc.size());
  for (std::size_t j = 0; j < acc.size(); ++j) {
    out[j] = static_cast<double>(acc[j]);
  }
  return out;
}

}  // namespace

ConfusionMatrix confusion_matrix(const PoissonChannel& channel) {
  channel.validate();
  const auto bounds = decision_thresholds(channel);
  ConfusionMatrix matrix(channel.n_top);
  for (int i = 0; i <= channel.n_top; ++i) {
    const auto masses = region_masses(channel.state_mean(i), bounds, channel.n_top);
    for (int j = 0; j <= channel.n_top; ++j) {
      matrix.at(i, j) = masses[static_cast<std::size_t>(j)];
    }
  }
  return matrix;
}

double counting_efficiency(const PoissonChannel& channel,
                           const PhotonNumberDistribution& input) {
  channel.validate();
  input.validate();
  const auto bounds = decision_thresholds(channel);
  long double efficiency = 0.0L;
  const long long support_top =
      std::min<long long>(channel.n_top, input.upper_quantile(1e-15));
  for (long long n = 0; n <= support_top; ++n) {
    const double weight = input.pmf(n);
    if (weight == 0.0) {
      continue;
    }
    const auto masses = region_masses(channel.state_mean(static_cast<int>(n)),
                                      bounds, channel.n_top);
    efficiency += static_cast<long double>(weight) *
                  masses[static_cast<std::size_t>(n)];
  }
  return static_cast<double>(efficiency);
}

int max_countable_n(const PoissonChannel& channel, double error_budget) {
  channel.validate();
  require(error_budget > 0.0 && error_budget < 0.5,
          "error_budget must be in (0, 0.5)");
  const auto bounds = decision_thresholds(channel);
  int n = 0;
  while (n <= channel.n_top) {
    const auto masses = region_masses(channel.state_mean(n), bounds, channel.n_top);
    const double miss = 1.0 - masses[static_cast<std::size_t>(n)];
    if (miss > error_budget) {
      break;
    }
    ++n;
  }
  return std::max(0, n - 1);
}

int default_n_top(double mu1, double bg, double error_budget) {
  require(std::isfinite(mu1) && mu1 > 0.0, "mu1 must be > 0");
  require(std::isfinite(bg) && bg >= 0.0, "bg must be >= 0");
  require(error_budget > 0.0 && error_budget < 0.5,
          "error_budget must be in (0, 0.5)");
  // normal approximation: state n fails when mu1 / (2 sqrt(n mu1 + bg))
  // drops below the two-sided quantile
  const double z = normal_upper_quantile(error_budget / 2.0);
  const double estimate =
      std::max(0.0, (mu1 * mu1 / (4.0 * z * z) - bg) / mu1);
  return static_cast<int>(std::ceil(3.0 * estimate + 10.0));
}

void MeasurementTimeQuery::validate() const {
  require(n_target >= 1, "n_target must be >= 1");
  require(error_budget > 0.0 && error_budget < 0.5,
          "error_budget must be in (0, 0.5)");
  require(std::isfinite(eta_s) && eta_s > 0.0 && eta_s <= 1.0,
          "eta_s must be in (0, 1]");
  require(std::isfinite(scatter_rate) && scatter_rate > 0.0,
          "scatter_rate must be > 0");
  require(std::isfinite(bg_rate) && bg_rate >= 0.0, "bg_rate must be >= 0");
  require(std::isfinite(leak_prob) && leak_prob >= 0.0 && leak_prob < 1.0,
          "leak_prob must be in [0, 1)");
  require(std::isfinite(max_time) && max_time >= 0.0, "max_time must be >= 0");
}

namespace {

double mu1_at_time(const MeasurementTimeQuery& query, double time) {
  ReadoutSpec spec;
  spec.scatter_rate = query.scatter_rate;
  spec.eta_s = query.eta_s;
  spec.measure_time = time;
  spec.leak_prob = query.leak_prob;
  spec.n_ground = 0.0;
  spec.detector_dark_rate = 0.0;
  return mean_signal_per_excitation(spec);
}

bool target_reachable(const MeasurementTimeQuery& query, double time) {
  const double mu1 = mu1_at_time(query, time);
  if (!(mu1 > 0.0)) {
    return false;
  }
  const double bg = query.bg_rate * time;
  const int n_top = std::max(default_n_top(mu1, bg, query.error_budget),
                             query.n_target + 5);
  const PoissonChannel channel{mu1, bg, n_top};
  return max_countable_n(channel, query.error_budget) >= query.n_target;
}

}  // namespace

std::optional<double> required_measurement_time(const MeasurementTimeQuery& query) {
  query.validate();
  const double cap = query.max_time > 0.0 ? query.max_time : 1e6;
  double hi = 1e-9;
  if (target_reachable(query, hi)) {
    while (hi > 1e-15 && target_reachable(query, hi / 2.0)) {
      hi /= 2.0;
    }
  } else {
    bool found = false;
    while (hi < cap) {
      hi = std::min(hi * 2.0, cap);
      if (target_reachable(query, hi)) {
        found = true;
        break;
      }
    }
    if (!found) {
      return std::nullopt;
    }
  }
  double lo = hi / 2.0;  // infeasible, or below the search floor
  for (int i = 0; i < 80 && (hi - lo) > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (target_reachable(query, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace polcount
