#pragma once

#include <polcount/rng.hpp>
#include <polcount/warnings.hpp>

namespace polcount {

/// Radiative and spectroscopic constants of the storage medium.
struct AtomicSpecies {
  double gamma_e;             // excited-state |e> spontaneous emission rate, rad/s
  double wavelength;          // probe transition wavelength, m
  double sigma_abs;           // resonant absorption cross-section, m^2
  double hyperfine_splitting; // |g>-|m> ground-state splitting, rad/s
  double gamma_mg;            // collective |g>-|m> coherence dephasing rate, 1/s
  bool sigma_derived = false; // sigma_abs came from the two-level default

  /// Two-level resonant cross-section 3*lambda^2 / (2*pi).
  static double default_cross_section(double wavelength);

  void validate() const;  // throws std::invalid_argument
};

/// Geometry and atom number of the cloud.
struct EnsembleConfig {
  double n_atoms;  // total atom count N
  double area;     // probe cross-sectional area A, m^2
  double length;   // medium length L, m
  double g_single; // single atom-field coupling strength g, rad/s
  bool g_derived = false;  // g_single came from the geometric default

  /// Free-space collective-coupling default, g^2 = 3 lambda^2 c Gamma_e / (8 pi A L).
  static double default_coupling(const AtomicSpecies& species, double area,
                                 double length);

  void validate() const;
};

enum class RampShape { linear, raised_cosine };

/// Coupling-field turn-off ramp.
struct CouplingRamp {
  double omega_c_max;  // peak Rabi frequency, rad/s
  double switch_time;  // 10%-to-90% turn-off duration, s
  RampShape shape = RampShape::linear;

  void validate() const;
};

enum class PhotonStatistics { fock, coherent, thermal };

/// Photon-number distribution of the input pulse. `value` is the Fock n
/// (must be a non-negative integer) or the mean nbar for coherent/thermal.
struct PhotonNumberDistribution {
  PhotonStatistics kind = PhotonStatistics::fock;
  double value = 1.0;

  double pmf(long long n) const;
  double mean() const;
  /// Smallest N with P(n > N) < tail (exact for fock; analytic for the rest).
  long long upper_quantile(double tail) const;
  long long sample(TrialRng& rng) const;

  void validate() const;
};

struct ProbePulse {
  double duration;   // intensity FWHM, s
  double bandwidth;  // spectral FWHM, rad/s
  PhotonNumberDistribution statistics;
  bool bandwidth_derived = false;  // bandwidth came from the transform limit

  /// Transform-limited Gaussian: bandwidth = 2*pi*0.44 / duration.
  static ProbePulse transform_limited(double duration,
                                      PhotonNumberDistribution statistics);

  void validate() const;
};

/// Derived storage-stage quantities for one parameter set.
struct StorageReport {
  double mixing_angle_initial;   // theta at omega_c_max, rad
  double optical_depth;          // alpha
  double transparency_bandwidth; // rad/s
  double group_velocity;         // m/s
  double compressed_length;      // group_velocity * duration, m
  double eta_storage;            // per-photon storage success probability
  double adiabaticity_margin;    // switch_time * transparency bandwidth
  // eta_storage factors, each in [0, 1]
  double eta_bandwidth;
  double eta_fit;
  double eta_adiabatic;
};

/// Dark-state-polariton mixing angle:
///   cos(theta) = omega_c / sqrt(omega_c^2 + g^2 N),
///   sin(theta) = g sqrt(N) / sqrt(omega_c^2 + g^2 N).
/// theta = pi/2 is the fully atomic (stopped-light) limit.
/// Rejects non-finite input and violated preconditions (g > 0, N >= 1,
/// ramp_value >= 0) with std::invalid_argument.
double mixing_angle(double ramp_value, double g, double n_atoms);

struct PolaritonAmplitudes {
  double photonic;  // cos(theta)
  double atomic;    // -sin(theta)
};

/// Amplitude pair of the n-excitation polariton state at mixing angle theta.
/// The state carries n quanta shared between the field and the collective
/// atomic excitation with these weights; weights^2 sum to 1.
PolaritonAmplitudes polariton_amplitudes(double theta, long long n);

/// alpha = N sigma / (2 A).
double optical_depth(const AtomicSpecies& species, const EnsembleConfig& ensemble);

/// Transparency-window width: delta_nu = omega_c^2 / (gamma_e sqrt(alpha)).
/// Warns (code "optically_thin") for alpha < 1 where the formula regime is
/// invalid.
double transparency_bandwidth(double omega_c, double gamma_e, double alpha,
                              WarningLog* log = nullptr);

/// v_g = c cos^2(theta).
double group_velocity(double theta);

/// margin = switch_time * transparency_bandwidth; >= 1 is taken as adiabatic.
double adiabaticity_margin(const CouplingRamp& ramp, double transparency_bw);

struct StorageEfficiency {
  double bandwidth_factor;  // exp(-(ratio^2)/2), Gaussian spectral filter
  double fit_factor;        // 1 / (1 + compressed/medium)
  double adiabatic_factor;  // 1 - exp(-margin)
  double total;             // product of the three
};

/// Per-photon storage success probability, factored into the spectral
/// admission, spatial fit and adiabaticity penalties. Every factor and the
/// product lie in [0, 1]; the product tends to 1 in the ideal limits.
StorageEfficiency storage_efficiency(const ProbePulse& pulse,
                                     double transparency_bw,
                                     double compressed_length,
                                     double medium_length,
                                     double adiabaticity_margin);

/// Draw an input photon number from the pulse statistics.
long long sample_photon_number(const ProbePulse& pulse, TrialRng& rng);

/// Map a pulse into stored collective excitations: sample n from the pulse
/// statistics, then thin Binomial(n, eta_store). eta_store = 1 reproduces the
/// ideal 1-1 photon-to-excitation mapping exactly.
long long store_pulse(const ProbePulse& pulse, double eta_store, TrialRng& rng);

/// Compose the closed forms above into a full storage report.
StorageReport build_storage_report(const AtomicSpecies& species,
                                   const EnsembleConfig& ensemble,
                                   const CouplingRamp& ramp,
                                   const ProbePulse& pulse,
                                   WarningLog* log = nullptr);

}  // namespace polcount
