#include <polcount/math_util.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polcount {

namespace {

constexpr long long kTableSize = 4096;

const std::array<long double, kTableSize>& factorial_table() {
  static const auto table = [] {
    std::array<long double, kTableSize> t{};
    for (long long k = 0; k < kTableSize; ++k) {
      t[static_cast<std::size_t>(k)] = lgammal(static_cast<long double>(k) + 1.0L);
    }
    return t;
  }();
  return table;
}

// Stirling series for ln Gamma(x), x = k + 1 >= kTableSize. The truncated
// term is below 1e-24 at x >= 4096.
long double stirling_log_gamma(long double x) {
  constexpr long double kHalfLogTwoPi = 0.91893853320467274178L;
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  long double series = inv / 12.0L;
  series -= inv * inv2 / 360.0L;
  series += inv * inv2 * inv2 / 1260.0L;
  series -= inv * inv2 * inv2 * inv2 / 1680.0L;
  return (x - 0.5L) * logl(x) - x + kHalfLogTwoPi + series;
}

}  // namespace

long double log_factorial_ld(long long k) {
  if (k < 0) {
    throw std::invalid_argument("log_factorial: negative argument");
  }
  if (k < kTableSize) {
    return factorial_table()[static_cast<std::size_t>(k)];
  }
  return stirling_log_gamma(static_cast<long double>(k) + 1.0L);
}

double log_factorial(long long k) {
  return static_cast<double>(log_factorial_ld(k));
}

long double poisson_log_pmf(long long k, double mean) {
  if (k < 0) {
    return -std::numeric_limits<long double>::infinity();
  }
  if (mean == 0.0) {
    // point mass at k == 0
    return k == 0 ? 0.0L : -std::numeric_limits<long double>::infinity();
  }
  const long double mu = mean;
  return static_cast<long double>(k) * logl(mu) - mu - log_factorial_ld(k);
}

double poisson_pmf(long long k, double mean) {
  const long double lp = poisson_log_pmf(k, mean);
  if (lp == -std::numeric_limits<long double>::infinity()) {
    return 0.0;
  }
  return static_cast<double>(expl(lp));
}

double normal_upper_quantile(double tail) {
  if (!(tail > 0.0 && tail <= 0.5)) {
    throw std::invalid_argument("normal_upper_quantile: tail must be in (0, 0.5]");
  }
  // P(Z > z) = erfc(z / sqrt(2)) / 2, monotone decreasing in z.
  double lo = 0.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > tail) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace polcount
