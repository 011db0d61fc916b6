#pragma once

#include <optional>
#include <vector>

#include <polcount/polariton.hpp>

namespace polcount {

/// Poisson counting channel: a stored excitation number n produces detected
/// counts k ~ Poisson(n * mu1 + bg). The classifier considers n in [0, n_top].
struct PoissonChannel {
  double mu1;  // mean detected counts per excitation, > 0
  double bg;   // mean background counts per measurement, >= 0
  int n_top;   // inclusive photon-number range [0, n_top], >= 1

  double state_mean(int n) const { return static_cast<double>(n) * mu1 + bg; }
  void validate() const;
};

/// P(n_hat = j | true n = i) for i, j in [0, n_top].
struct ConfusionMatrix {
  int n_top = 0;
  std::vector<double> entries;  // (n_top+1)^2, row-major

  explicit ConfusionMatrix(int top = 0)
      : n_top(top),
        entries(static_cast<std::size_t>(top + 1) * (top + 1), 0.0) {}

  double at(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * (n_top + 1) + j];
  }
  double& at(int i, int j) {
    return entries[static_cast<std::size_t>(i) * (n_top + 1) + j];
  }
  double row_sum(int i) const;
  double diagonal(int i) const { return at(i, i); }
};

/// Maximum-likelihood photon-number estimate:
///   n_hat = argmax_n Poisson(k; n mu1 + bg), ties broken toward smaller n.
/// Non-decreasing in k.
int classify(long long counts, const PoissonChannel& channel);

/// Integer decision boundaries k*_n, n = 0 .. n_top-1: the largest count
/// still classified as n. Decision region of n is (k*_{n-1}, k*_n], with the
/// top region open to the right. Derived from the closed-form crossover
/// mu1 / ln((n+1) mu1 + bg) / (n mu1 + bg)) and then pinned with the same
/// likelihood comparisons classify uses, so the two agree for every k.
std::vector<long long> decision_thresholds(const PoissonChannel& channel);

/// Table-driven equivalent of classify (O(log n_top)); agrees with classify
/// for every k by construction of the thresholds.
int classify_with_thresholds(long long counts,
                             const std::vector<long long>& thresholds);

/// Exact confusion matrix by direct Poisson summation over the decision
/// regions; tails truncated below 1e-13 total mass so each row sums to 1
/// within 1e-12.
ConfusionMatrix confusion_matrix(const PoissonChannel& channel);

/// Probability of an exactly correct count for a given input distribution:
///   sum_n P(n) * P(n_hat = n | n).
/// The distribution must be (essentially) supported within [0, n_top];
/// input mass above n_top can never be classified correctly and counts as
/// error.
double counting_efficiency(const PoissonChannel& channel,
                           const PhotonNumberDistribution& input);

/// Largest n such that every state i <= n satisfies
/// 1 - P(n_hat = i | i) <= error_budget, searched within the channel's
/// n_support (so mu1 -> inf gives n_top). Returns 0 when even the vacuum
/// state exceeds the budget.
int max_countable_n(const PoissonChannel& channel, double error_budget);

/// Channel sizing rule: n_top = ceil(3 * n_max_estimate + 10), with the
/// estimate from the normal approximation to the per-state error.
int default_n_top(double mu1, double bg, double error_budget);

struct MeasurementTimeQuery {
  int n_target;           // photon number that must be countable
  double error_budget;    // per-state misclassification budget, in (0, 0.5)
  double eta_s;           // collection x detection efficiency
  double scatter_rate;    // R_s, 1/s
  double bg_rate;         // background counts per second
  double leak_prob = 0.0; // cycling-transition leak probability
  double max_time = 0.0;  // optional cap, s; 0 = uncapped

  void validate() const;
};

/// Minimal measurement time T with max_countable_n(channel(T)) >= n_target,
/// by bracketing + bisection over the exact confusion-matrix computation.
/// Returns nullopt when the leakage saturation or the time cap makes the
/// target unreachable.
std::optional<double> required_measurement_time(const MeasurementTimeQuery& query);

}  // namespace polcount
