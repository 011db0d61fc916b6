#pragma once

#include <cstdint>
#include <random>

namespace polcount {

/// SplitMix64 finalizer; bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t x);

/// Stream-seed derivation for counter-based trial streams. Streams for
/// distinct (domain, index) pairs are statistically independent, and a run
/// is reproducible from the top-level seed alone regardless of how trials
/// are scheduled across threads.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t domain,
                                 std::uint64_t index);

inline constexpr std::uint64_t kDomainTrial = 0x747269616cULL;   // "trial"
inline constexpr std::uint64_t kDomainSweep = 0x7377656570ULL;   // "sweep"
inline constexpr std::uint64_t kDomainReport = 0x7265706f7274ULL;  // "report"

/// One random stream. The engine (std::mt19937_64) has standard-specified,
/// platform-independent output; the samplers below are hand-rolled so the
/// produced variates are also bit-identical across standard libraries
/// (std::poisson_distribution et al. are implementation-defined).
class TrialRng {
 public:
  explicit TrialRng(std::uint64_t stream_seed) : engine_(stream_seed) {}

  static TrialRng for_trial(std::uint64_t seed, std::uint64_t trial_index) {
    return TrialRng(derive_stream_seed(seed, kDomainTrial, trial_index));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_open() { return 1.0 - uniform(); }

  /// Poisson(mean). Inversion by sequential search for small means,
  /// Hörmann's PTRS transformed rejection for mean >= 10.
  long long poisson(double mean);

  /// Binomial(n, p) by Bernoulli counting for small n, waiting-time
  /// (geometric skip) counting otherwise. Exact for all n, p.
  long long binomial(long long n, double p);

  /// Geometric on {1, 2, ...} with success probability p; mean 1/p.
  /// Number of scattering events up to and including the one that leaks.
  long long geometric(double p);

  /// Bose-Einstein (thermal) occupation on {0, 1, ...} with mean nbar.
  long long bose_einstein(double nbar);

 private:
  std::mt19937_64 engine_;
};

}  // namespace polcount
