#pragma once

#include <cstdint>
#include <vector>

#include <polcount/polariton.hpp>
#include <polcount/rng.hpp>
#include <polcount/warnings.hpp>

namespace polcount {

/// State-selective fluorescence detection parameters.
struct ReadoutSpec {
  double scatter_rate;        // single-atom resonant scattering rate R_s, 1/s
  double eta_s;               // photon collection x detection efficiency
  double measure_time;        // detection window T, s
  double leak_prob;           // per-scattering-event probability of leaving the cycling transition
  double n_ground;            // atoms remaining in |g> exposed to the detection laser
  double detector_dark_rate;  // intrinsic detector background, counts/s

  void validate() const;
};

/// One Monte Carlo trial.
struct CountRecord {
  long long true_n;             // incident photon number
  long long stored_m;           // excitations after storage (<= true_n)
  long long detected_counts;    // signal + background
  long long background_counts;  // background portion (diagnostic)
};

/// Expected detected counts per stored excitation,
///   mu1 = eta_s * E[min(Geometric(leak_prob), N_window)],
/// N_window ~ Poisson(R_s T). With leak_prob = 0 this is eta_s * R_s * T
/// exactly; for R_s T -> inf it saturates at eta_s / leak_prob.
double mean_signal_per_excitation(const ReadoutSpec& spec);

/// Off-resonant / resonant scattering-rate ratio for a ground-state atom
/// seen by the detection laser detuned by the hyperfine splitting:
/// far Lorentzian wing, ratio = (gamma_e / (2 delta_hf))^2.
/// Warns (code "wing_approximation_invalid") when delta_hf < 10 gamma_e.
double off_resonant_ratio(const AtomicSpecies& species, WarningLog* log = nullptr);

/// Ground-state atom number at which the off-resonant background rate equals
/// one excitation's signal rate: N_max = 1 / off_resonant_ratio.
double max_ground_atoms(const AtomicSpecies& species);

/// Mean background counts in the window:
///   (n_ground * off_ratio * R_s * eta_s + detector_dark_rate) * T.
double mean_background_counts(const ReadoutSpec& spec, double off_ratio);

/// Detected photons contributed by a single stored excitation.
/// leak_prob = 0: Poisson(eta_s R_s T) (thinned Poisson identity).
/// leak_prob > 0: Binomial(min(Geometric(p), Poisson(R_s T)), eta_s).
long long sample_excitation_counts(const ReadoutSpec& spec, TrialRng& rng);

/// Immutable description of a fluorescence-readout Monte Carlo experiment.
struct ReadoutScenario {
  ProbePulse pulse;
  double eta_store;        // per-photon storage success probability
  ReadoutSpec spec;
  double off_ratio;        // off_resonant_ratio of the species in use

  void validate() const;
};

/// One full trial: storage thinning, per-excitation fluorescence, Poisson
/// background. Identical (seed, trial-index) pairs give identical records.
CountRecord simulate_trial(const ReadoutScenario& scenario, TrialRng& rng);

/// n_trials independent trials on counter-based streams derived from
/// (seed, trial index). Records are ordered by trial index and reproducible
/// from the seed alone for any thread count.
std::vector<CountRecord> run_trials(long long n_trials,
                                    const ReadoutScenario& scenario,
                                    std::uint64_t seed, int n_threads = 1);

}  // namespace polcount
