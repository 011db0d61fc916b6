#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <polcount/estimator.hpp>

#include "test_util.hpp"

using namespace polcount;

namespace {

// Exhaustive-count range covering everything but ~1e-12 of the top state.
long long checked_count_range(const PoissonChannel& channel) {
  const double top_mean = channel.state_mean(channel.n_top);
  return static_cast<long long>(top_mean + 8.0 * std::sqrt(top_mean) + 60.0);
}

// Independent n_max oracle: decision regions found by scanning the
// brute-force classifier, per-state mass summed from the oracle pmf.
int oracle_n_max(double mu1, double bg, int n_top, double eps) {
  const long long k_hi = static_cast<long long>(
      n_top * mu1 + bg + 10.0 * std::sqrt(n_top * mu1 + bg) + 60.0);
  int n = 0;
  while (n <= n_top) {
    const long double mu = static_cast<long double>(n) * mu1 + bg;
    long double diag = 0.0L;
    long double pmf = expl(-mu);
    for (long long k = 0; k <= k_hi; ++k) {
      if (k > 0) {
        pmf *= mu / static_cast<long double>(k);
      }
      if (test_util::oracle_classify(k, mu1, bg, n_top) == n) {
        diag += pmf;
      }
    }
    if (1.0L - diag > static_cast<long double>(eps)) {
      break;
    }
    ++n;
  }
  return std::max(0, n - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// maximum-likelihood classification
// ---------------------------------------------------------------------------

TEST_CASE("classify: zero counts with zero background is the vacuum") {
  const PoissonChannel channel{100.0, 0.0, 10};
  CHECK(classify(0, channel) == 0);
  // any k >= 1 rules the vacuum out when bg = 0
  CHECK(classify(1, channel) == 1);
}

TEST_CASE("classify agrees with the brute-force likelihood oracle") {
  // the crossover between 2 and 3 sits at 20/ln(3/2) ~ 49.3, so 50 -> 3
  const PoissonChannel channel{20.0, 0.0, 10};
  CHECK(test_util::oracle_classify(50, 20.0, 0.0, 10) == 3);
  CHECK(classify(50, channel) == 3);

  for (long long k = 0; k <= 300; ++k) {
    CHECK(classify(k, channel) == test_util::oracle_classify(k, 20.0, 0.0, 10));
  }
  const PoissonChannel noisy{20.0, 7.5, 10};
  for (long long k = 0; k <= 300; ++k) {
    CHECK(classify(k, noisy) == test_util::oracle_classify(k, 20.0, 7.5, 10));
  }
}

TEST_CASE("classify is non-decreasing in the count") {
  test_util::ParamGen gen(41);
  for (int channel_index = 0; channel_index < 25; ++channel_index) {
    const double mu1 = gen.log_uniform(2.0, 300.0);
    const double bg = gen.uniform() < 0.3 ? 0.0 : gen.log_uniform(0.1, 50.0);
    const PoissonChannel channel{mu1, bg, static_cast<int>(gen.integer(3, 25))};
    int prev = 0;
    for (long long k = 0; k <= checked_count_range(channel); ++k) {
      const int n_hat = classify(k, channel);
      CHECK(n_hat >= prev);
      prev = n_hat;
    }
  }
}

// ---------------------------------------------------------------------------
// decision thresholds
// ---------------------------------------------------------------------------

TEST_CASE("thresholds: closed-form examples at mu1 = 100, bg = 0") {
  const PoissonChannel channel{100.0, 0.0, 10};
  const auto bounds = decision_thresholds(channel);
  REQUIRE(bounds.size() == 10);
  // the vacuum region degenerates to {0} without background
  CHECK(bounds[0] == 0);
  // crossover 100 / ln(6/5) = 548.48 -> boundary count 548
  CHECK(bounds[5] == 548);
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    CHECK(bounds[i] > bounds[i - 1]);
  }
}

TEST_CASE("thresholds and classify agree exhaustively on random channels") {
  test_util::ParamGen gen(43);
  for (int channel_index = 0; channel_index < 40; ++channel_index) {
    const double mu1 = gen.log_uniform(1.5, 400.0);
    const double bg = gen.uniform() < 0.25 ? 0.0 : gen.log_uniform(0.01, 80.0);
    const PoissonChannel channel{mu1, bg, static_cast<int>(gen.integer(2, 30))};
    const auto bounds = decision_thresholds(channel);
    for (long long k = 0; k <= checked_count_range(channel); ++k) {
      CHECK(classify_with_thresholds(k, bounds) == classify(k, channel));
    }
    // boundary membership realizes the ties-to-smaller-n rule: the bound
    // itself stays with n, the next count moves on
    for (std::size_t n = 0; n < bounds.size(); ++n) {
      CHECK(classify(bounds[n], channel) <= static_cast<int>(n));
      CHECK(classify(bounds[n] + 1, channel) >= static_cast<int>(n) + 1);
    }
  }
}

TEST_CASE("thresholds shift up as the background grows") {
  const int n_top = 8;
  std::vector<long long> prev;
  for (const double bg : {0.0, 1.0, 5.0, 20.0, 80.0}) {
    const PoissonChannel channel{50.0, bg, n_top};
    const auto bounds = decision_thresholds(channel);
    if (!prev.empty()) {
      for (std::size_t i = 0; i < bounds.size(); ++i) {
        CHECK(bounds[i] >= prev[i]);
      }
      CHECK(bounds[0] > prev[0]);  // strict at the vacuum boundary
    }
    prev = bounds;
  }
}

// ---------------------------------------------------------------------------
// exact confusion matrix
// ---------------------------------------------------------------------------

TEST_CASE("confusion-matrix rows sum to one within 1e-12") {
  test_util::ParamGen gen(47);
  for (int channel_index = 0; channel_index < 20; ++channel_index) {
    const double mu1 = gen.log_uniform(1.0, 500.0);
    const double bg = gen.uniform() < 0.3 ? 0.0 : gen.log_uniform(0.01, 100.0);
    const PoissonChannel channel{mu1, bg, static_cast<int>(gen.integer(2, 20))};
    const ConfusionMatrix matrix = confusion_matrix(channel);
    for (int i = 0; i <= channel.n_top; ++i) {
      CHECK(std::fabs(matrix.row_sum(i) - 1.0) < 1e-12);
      for (int j = 0; j <= channel.n_top; ++j) {
        CHECK(matrix.at(i, j) >= 0.0);
        CHECK(matrix.at(i, j) <= 1.0);
      }
    }
  }
}

TEST_CASE("strong channels are asymptotically perfect") {
  const PoissonChannel channel{1e4, 0.0, 5};
  const ConfusionMatrix matrix = confusion_matrix(channel);
  for (int i = 0; i <= 5; ++i) {
    CHECK(matrix.diagonal(i) >= 1.0 - 1e-6);
  }
}

TEST_CASE("mu1 = 100 separates one excitation from noise at the 99% level") {
  const PoissonChannel channel{100.0, 0.0, 10};
  const ConfusionMatrix matrix = confusion_matrix(channel);
  CHECK(matrix.diagonal(1) >= 0.99);
  CHECK(matrix.at(0, 0) == doctest::Approx(1.0));  // vacuum is error-free at bg 0
}

TEST_CASE("confusion matrix matches a brute-force oracle entry by entry") {
  const PoissonChannel channel{30.0, 4.0, 6};
  const ConfusionMatrix matrix = confusion_matrix(channel);
  const long long k_hi = checked_count_range(channel);
  for (int i = 0; i <= channel.n_top; ++i) {
    std::vector<long double> masses(static_cast<std::size_t>(channel.n_top) + 1,
                                    0.0L);
    const long double mu = channel.state_mean(i);
    long double pmf = expl(-mu);
    for (long long k = 0; k <= k_hi; ++k) {
      if (k > 0) {
        pmf *= mu / static_cast<long double>(k);
      }
      masses[static_cast<std::size_t>(
          test_util::oracle_classify(k, channel.mu1, channel.bg, channel.n_top))] +=
          pmf;
    }
    for (int j = 0; j <= channel.n_top; ++j) {
      CHECK(matrix.at(i, j) ==
            doctest::Approx(static_cast<double>(masses[static_cast<std::size_t>(j)]))
                .epsilon(1e-9));
    }
  }
}

// ---------------------------------------------------------------------------
// counting efficiency
// ---------------------------------------------------------------------------

TEST_CASE("a perfect channel counts every supported distribution correctly") {
  const PoissonChannel channel{1e6, 0.0, 40};
  for (const PhotonNumberDistribution dist :
       {PhotonNumberDistribution{PhotonStatistics::fock, 3.0},
        PhotonNumberDistribution{PhotonStatistics::coherent, 2.0},
        PhotonNumberDistribution{PhotonStatistics::thermal, 1.5}}) {
    CHECK(counting_efficiency(channel, dist) >= 1.0 - 1e-6);
  }
}

TEST_CASE("single photon at mu1 = 1000 with unit background counts at 99%") {
  const PoissonChannel channel{1000.0, 1.0, 12};
  const PhotonNumberDistribution fock1{PhotonStatistics::fock, 1.0};
  CHECK(counting_efficiency(channel, fock1) >= 0.99);
}

TEST_CASE("efficiency decreases as the background grows") {
  const PhotonNumberDistribution fock2{PhotonStatistics::fock, 2.0};
  double prev = 2.0;
  for (const double bg : {0.0, 2.0, 8.0, 25.0, 60.0}) {
    const PoissonChannel channel{50.0, bg, 12};
    const double eff = counting_efficiency(channel, fock2);
    CHECK(eff <= prev + 1e-12);
    prev = eff;
  }
}

// ---------------------------------------------------------------------------
// n_max design solver
//
// Oracle-pinned regression value: at (mu1 = 100, bg = 0, eps = 0.01) the
// exact per-state error crosses 1% between n = 3 and n = 4 (the normal
// approximation suggests ~4; the exact Poisson summation gives 3).
// ---------------------------------------------------------------------------

TEST_CASE("n_max at (mu1=100, bg=0, eps=0.01): oracle-pinned value") {
  const int from_oracle = oracle_n_max(100.0, 0.0, 22, 0.01);
  const PoissonChannel channel{100.0, 0.0, 22};
  const int n_max = max_countable_n(channel, 0.01);
  CHECK(n_max == from_oracle);
  CHECK(n_max == 3);       // frozen oracle value
  CHECK(n_max * 10 < 100);  // far below the occupancy heuristic mu1
}

TEST_CASE("n_max reaches the channel top for unbounded discrimination") {
  const PoissonChannel channel{1e8, 0.0, 6};
  CHECK(max_countable_n(channel, 0.01) == 6);
}

TEST_CASE("n_max grows with mu1 and shrinks with background and budget") {
  int prev = -1;
  for (const double mu1 : {25.0, 100.0, 400.0, 1600.0}) {
    const PoissonChannel channel{mu1, 0.0, default_n_top(mu1, 0.0, 0.01)};
    const int n_max = max_countable_n(channel, 0.01);
    CHECK(n_max >= prev);
    prev = n_max;
  }

  prev = 1000;
  for (const double bg : {0.0, 5.0, 20.0, 100.0}) {
    const PoissonChannel channel{100.0, bg, default_n_top(100.0, bg, 0.01) + 10};
    const int n_max = max_countable_n(channel, 0.01);
    CHECK(n_max <= prev);
    prev = n_max;
  }

  prev = -1;
  for (const double eps : {0.001, 0.01, 0.1}) {
    const PoissonChannel channel{100.0, 0.0, default_n_top(100.0, 0.0, eps) + 10};
    const int n_max = max_countable_n(channel, eps);
    CHECK(n_max >= prev);
    prev = n_max;
  }
}

TEST_CASE("default channel sizing leaves room above the reachable n_max") {
  const int n_top = default_n_top(100.0, 0.0, 0.01);
  const PoissonChannel channel{100.0, 0.0, n_top};
  CHECK(n_top >= max_countable_n(channel, 0.01) + 5);
}

// ---------------------------------------------------------------------------
// required measurement time
// ---------------------------------------------------------------------------

namespace {

MeasurementTimeQuery single_photon_query() {
  MeasurementTimeQuery q;
  q.n_target = 1;
  q.error_budget = 0.01;
  q.eta_s = 0.1;
  q.scatter_rate = 1e7;
  q.bg_rate = 0.0;
  return q;
}

bool reachable_at(const MeasurementTimeQuery& q, double time) {
  const double mu1 = q.eta_s * q.scatter_rate * time;
  const double bg = q.bg_rate * time;
  const PoissonChannel channel{mu1, bg,
                               std::max(default_n_top(mu1, bg, q.error_budget),
                                        q.n_target + 5)};
  return max_countable_n(channel, q.error_budget) >= q.n_target;
}

}  // namespace

TEST_CASE("single-photon targets need microsecond-scale windows") {
  const MeasurementTimeQuery q = single_photon_query();
  const auto time = required_measurement_time(q);
  REQUIRE(time.has_value());
  // tens of detected counts suffice: mu1(T*) in the tens
  const double mu1 = q.eta_s * q.scatter_rate * *time;
  CHECK(mu1 > 10.0);
  CHECK(mu1 < 60.0);
  CHECK(*time > 1e-6);
  CHECK(*time < 1e-4);
  // minimality: feasible at T*, infeasible slightly below
  CHECK(reachable_at(q, *time));
  CHECK_FALSE(reachable_at(q, *time * 0.999));
}

TEST_CASE("doubling the detection efficiency halves the required time") {
  MeasurementTimeQuery q = single_photon_query();
  const auto base = required_measurement_time(q);
  q.eta_s = 0.2;
  const auto doubled = required_measurement_time(q);
  REQUIRE(base.has_value());
  REQUIRE(doubled.has_value());
  CHECK(*doubled / *base == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("a loose budget collapses the required time without divergence") {
  MeasurementTimeQuery q = single_photon_query();
  q.error_budget = 0.499;
  const auto time = required_measurement_time(q);
  REQUIRE(time.has_value());
  CHECK(*time > 0.0);
  CHECK(*time < 1e-4);
}

TEST_CASE("leakage saturation makes large targets infeasible") {
  MeasurementTimeQuery q;
  q.n_target = 5;
  q.error_budget = 0.01;
  q.eta_s = 0.1;
  q.scatter_rate = 1e7;
  q.bg_rate = 0.0;
  q.leak_prob = 0.01;  // mu1 saturates at eta_s / leak = 10
  q.max_time = 10.0;
  CHECK_FALSE(required_measurement_time(q).has_value());
}

TEST_CASE("a hard time cap is reported as infeasible") {
  MeasurementTimeQuery q = single_photon_query();
  q.max_time = 1e-9;
  CHECK_FALSE(required_measurement_time(q).has_value());
}
