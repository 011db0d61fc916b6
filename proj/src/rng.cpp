#include <polcount/rng.hpp>

#include <cmath>
#include <stdexcept>

#include <polcount/math_util.hpp>

namespace polcount {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t domain,
                                 std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ domain) ^ index);
}

namespace {

// Poisson by sequential cdf inversion; for mean < 10 the loop stays short.
long long poisson_inversion(TrialRng& rng, double mean) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  long long k = 0;
  while (u > cdf && k < 20000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// W. Hörmann's PTRS transformed-rejection Poisson sampler (1993), exact for
// mean >= 10.
long long poisson_ptrs(TrialRng& rng, double mean) {
  const double log_mu = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) {
      return static_cast<long long>(kf);
    }
    if (kf < 0.0 || (us < 0.013 && v > us)) {
      continue;
    }
    const long long k = static_cast<long long>(kf);
    const double lhs =
        std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = kf * log_mu - mean - log_factorial(k);
    if (lhs <= rhs) {
      return k;
    }
  }
}

}  // namespace

long long TrialRng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) {
    return 0;
  }
  return mean < 10.0 ? poisson_inversion(*this, mean) : poisson_ptrs(*this, mean);
}

long long TrialRng::binomial(long long n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial: need n >= 0 and p in [0, 1]");
  }
  if (n == 0 || p == 0.0) {
    return 0;
  }
  if (p == 1.0) {
    return n;
  }
  if (p > 0.5) {
    return n - binomial(n, 1.0 - p);
  }
  if (n <= 64) {
    long long count = 0;
    for (long long i = 0; i < n; ++i) {
      if (uniform() < p) {
        ++count;
      }
    }
    return count;
  }
  // Waiting-time method: jump over failure runs with geometric skips;
  // expected cost is n*p + 1 draws.
  const double log_q = std::log1p(-p);
  long long count = 0;
  long long pos = 0;
  for (;;) {
    const double failures = std::floor(std::log(uniform_open()) / log_q);
    if (failures > static_cast<double>(n)) {
      return count;  // next success falls beyond the last trial
    }
    pos += static_cast<long long>(failures) + 1;
    if (pos > n) {
      return count;
    }
    ++count;
  }
}

long long TrialRng::geometric(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("geometric: need p in (0, 1]");
  }
  if (p == 1.0) {
    return 1;
  }
  const double g = std::floor(std::log(uniform_open()) / std::log1p(-p));
  if (g >= 9.0e18) {
    return 9000000000000000000LL;  // keep the cast in range for absurd p
  }
  return static_cast<long long>(g) + 1;
}

long long TrialRng::bose_einstein(double nbar) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw std::invalid_argument("bose_einstein: mean must be finite and >= 0");
  }
  if (nbar == 0.0) {
    return 0;
  }
  // P(n) = nbar^n / (1 + nbar)^(n+1): geometric on {0, 1, ...} with
  // failure probability nbar / (1 + nbar).
  const double log_q = std::log(nbar / (1.0 + nbar));
  const double g = std::floor(std::log(uniform_open()) / log_q);
  if (g >= 9.0e18) {
    return 9000000000000000000LL;
  }
  return static_cast<long long>(g);
}

}  // namespace polcount
