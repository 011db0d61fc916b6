#include <polcount/polariton.hpp>

#include <cmath>
#include <stdexcept>

#include <polcount/constants.hpp>
#include <polcount/math_util.hpp>

namespace polcount {

namespace {

void require(bool ok, const char* message) {
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

double AtomicSpecies::default_cross_section(double wavelength) {
  return 3.0 * wavelength * wavelength / kTwoPi;
}

void AtomicSpecies::validate() const {
  require(finite(gamma_e) && gamma_e > 0.0, "species.gamma_e must be > 0");
  require(finite(wavelength) && wavelength > 0.0, "species.wavelength must be > 0");
  require(finite(sigma_abs) && sigma_abs > 0.0, "species.sigma_abs must be > 0");
  require(finite(hyperfine_splitting) && hyperfine_splitting > 0.0,
          "species.hyperfine_splitting must be > 0");
  require(finite(gamma_mg) && gamma_mg > 0.0, "species.gamma_mg must be > 0");
  // two-level resonant cross-section is the physical ceiling
  require(sigma_abs <= default_cross_section(wavelength) * 1.01,
          "species.sigma_abs exceeds the two-level limit 3*lambda^2/(2*pi)");
}

double EnsembleConfig::default_coupling(const AtomicSpecies& species, double area,
                                        double length) {
  // Free-space collective coupling: g^2 = 3 lambda^2 c Gamma_e / (8 pi A L),
  // which ties g^2 N to the optical depth via g^2 N = alpha c Gamma_e / (2 L).
  const double lambda = species.wavelength;
  return std::sqrt(3.0 * lambda * lambda * kSpeedOfLight * species.gamma_e /
                   (8.0 * kPi * area * length));
}

void EnsembleConfig::validate() const {
  require(finite(n_atoms) && n_atoms >= 1.0, "ensemble.n_atoms must be >= 1");
  require(finite(area) && area > 0.0, "ensemble.area must be > 0");
  require(finite(length) && length > 0.0, "ensemble.length must be > 0");
  require(finite(g_single) && g_single > 0.0, "ensemble.g_single must be > 0");
}

void CouplingRamp::validate() const {
  require(finite(omega_c_max) && omega_c_max > 0.0, "ramp.omega_c_max must be > 0");
  require(finite(switch_time) && switch_time > 0.0, "ramp.switch_time must be > 0");
}

double PhotonNumberDistribution::pmf(long long n) const {
  if (n < 0) {
    return 0.0;
  }
  switch (kind) {
    case PhotonStatistics::fock:
      return n == static_cast<long long>(value) ? 1.0 : 0.0;
    case PhotonStatistics::coherent:
      return poisson_pmf(n, value);
    case PhotonStatistics::thermal: {
      if (value == 0.0) {
        return n == 0 ? 1.0 : 0.0;
      }
      const double log_p = static_cast<double>(n) * std::log(value) -
                           static_cast<double>(n + 1) * std::log1p(value);
      return std::exp(log_p);
    }
  }
  return 0.0;
}

double PhotonNumberDistribution::mean() const { return value; }

long long PhotonNumberDistribution::upper_quantile(double tail) const {
  switch (kind) {
    case PhotonStatistics::fock:
      return static_cast<long long>(value);
    case PhotonStatistics::coherent: {
      // Chernoff-style envelope: mean + spread covers the tail comfortably
      const double spread = 10.0 * std::sqrt(value + 1.0) - 2.0 * std::log(tail) / 3.0;
      return static_cast<long long>(std::ceil(value + spread));
    }
    case PhotonStatistics::thermal: {
      if (value == 0.0) {
        return 0;
      }
      // P(n > N) = (nbar/(1+nbar))^(N+1)
      const double log_q = std::log(value / (1.0 + value));
      return static_cast<long long>(std::ceil(std::log(tail) / log_q));
    }
  }
  return 0;
}

long long PhotonNumberDistribution::sample(TrialRng& rng) const {
  switch (kind) {
    case PhotonStatistics::fock:
      return static_cast<long long>(value);
    case PhotonStatistics::coherent:
      return rng.poisson(value);
    case PhotonStatistics::thermal:
      return rng.bose_einstein(value);
  }
  return 0;
}

void PhotonNumberDistribution::validate() const {
  require(finite(value) && value >= 0.0, "pulse.photon_number must be >= 0");
  if (kind == PhotonStatistics::fock) {
    require(value == std::floor(value), "fock photon_number must be an integer");
  }
}

ProbePulse ProbePulse::transform_limited(double duration,
                                         PhotonNumberDistribution statistics) {
  ProbePulse pulse;
  pulse.duration = duration;
  pulse.bandwidth = kTwoPi * kGaussianTimeBandwidthFwhm / duration;
  pulse.statistics = statistics;
  pulse.bandwidth_derived = true;
  pulse.validate();
  return pulse;
}

void ProbePulse::validate() const {
  require(finite(duration) && duration > 0.0, "pulse.duration must be > 0");
  require(finite(bandwidth) && bandwidth > 0.0, "pulse.bandwidth must be > 0");
  statistics.validate();
  const double limit = kTwoPi * kGaussianTimeBandwidthFwhm;
  require(duration * bandwidth >= limit * (1.0 - 1e-9),
          "pulse.duration * bandwidth is below the Gaussian transform limit");
}

double mixing_angle(double ramp_value, double g, double n_atoms) {
  require(finite(ramp_value) && finite(g) && finite(n_atoms),
          "mixing_angle: non-finite input");
  require(g > 0.0, "mixing_angle: g must be > 0");
  require(n_atoms >= 1.0, "mixing_angle: n_atoms must be >= 1");
  require(ramp_value >= 0.0, "mixing_angle: ramp_value must be >= 0");
  // tan(theta) = g sqrt(N) / omega_c; atan2 handles the stopped-light limit
  return std::atan2(g * std::sqrt(n_atoms), ramp_value);
}

PolaritonAmplitudes polariton_amplitudes(double theta, long long n) {
  require(finite(theta) && theta >= 0.0 && theta <= kPi / 2.0,
          "polariton_amplitudes: theta must be in [0, pi/2]");
  require(n >= 0, "polariton_amplitudes: n must be >= 0");
  return PolaritonAmplitudes{std::cos(theta), -std::sin(theta)};
}

double optical_depth(const AtomicSpecies& species, const EnsembleConfig& ensemble) {
  species.validate();
  ensemble.validate();
  return ensemble.n_atoms * species.sigma_abs / (2.0 * ensemble.area);
}

double transparency_bandwidth(double omega_c, double gamma_e, double alpha,
                              WarningLog* log) {
  require(finite(omega_c) && omega_c > 0.0, "transparency_bandwidth: omega_c must be > 0");
  require(finite(gamma_e) && gamma_e > 0.0, "transparency_bandwidth: gamma_e must be > 0");
  require(finite(alpha) && alpha > 0.0, "transparency_bandwidth: alpha must be > 0");
  if (alpha < 1.0) {
    warn(log, "optically_thin",
         "optical depth below 1: the transparency-window formula assumes an "
         "optically thick medium");
  }
  return omega_c * omega_c / (gamma_e * std::sqrt(alpha));
}

double group_velocity(double theta) {
  require(finite(theta) && theta >= 0.0 && theta <= kPi / 2.0,
          "group_velocity: theta must be in [0, pi/2]");
  const double c = std::cos(theta);
  return kSpeedOfLight * c * c;
}

double adiabaticity_margin(const CouplingRamp& ramp, double transparency_bw) {
  ramp.validate();
  require(finite(transparency_bw) && transparency_bw > 0.0,
          "adiabaticity_margin: transparency bandwidth must be > 0");
  return ramp.switch_time * transparency_bw;
}

StorageEfficiency storage_efficiency(const ProbePulse& pulse,
                                     double transparency_bw,
                                     double compressed_length,
                                     double medium_length,
                                     double adiabaticity_margin) {
  pulse.validate();
  require(finite(transparency_bw) && transparency_bw > 0.0,
          "storage_efficiency: transparency bandwidth must be > 0");
  require(finite(compressed_length) && compressed_length >= 0.0,
          "storage_efficiency: compressed_length must be >= 0");
  require(finite(medium_length) && medium_length > 0.0,
          "storage_efficiency: medium_length must be > 0");
  require(adiabaticity_margin >= 0.0,
          "storage_efficiency: margin must be >= 0");

  StorageEfficiency eta;
  // Gaussian spectral filter on the bandwidth-admission condition
  const double ratio = pulse.bandwidth / transparency_bw;
  eta.bandwidth_factor = std::exp(-0.5 * ratio * ratio);
  // monotone surrogate for truncation of a pulse longer than the medium
  eta.fit_factor = 1.0 / (1.0 + compressed_length / medium_length);
  eta.adiabatic_factor = -std::expm1(-adiabaticity_margin);
  eta.total = eta.bandwidth_factor * eta.fit_factor * eta.adiabatic_factor;
  return eta;
}

long long sample_photon_number(const ProbePulse& pulse, TrialRng& rng) {
  return pulse.statistics.sample(rng);
}

long long store_pulse(const ProbePulse& pulse, double eta_store, TrialRng& rng) {
  require(finite(eta_store) && eta_store >= 0.0 && eta_store <= 1.0,
          "store_pulse: eta_store must be in [0, 1]");
  const long long n = sample_photon_number(pulse, rng);
  return rng.binomial(n, eta_store);
}

StorageReport build_storage_report(const AtomicSpecies& species,
                                   const EnsembleConfig& ensemble,
                                   const CouplingRamp& ramp,
                                   const ProbePulse& pulse,
                                   WarningLog* log) {
  ramp.validate();
  pulse.validate();

  StorageReport report;
  report.optical_depth = optical_depth(species, ensemble);
  report.mixing_angle_initial =
      mixing_angle(ramp.omega_c_max, ensemble.g_single, ensemble.n_atoms);
  report.transparency_bandwidth = transparency_bandwidth(
      ramp.omega_c_max, species.gamma_e, report.optical_depth, log);
  report.group_velocity = group_velocity(report.mixing_angle_initial);
  report.compressed_length = report.group_velocity * pulse.duration;
  report.adiabaticity_margin =
      adiabaticity_margin(ramp, report.transparency_bandwidth);
  if (report.adiabaticity_margin < 1.0) {
    warn(log, "non_adiabatic",
         "coupling turn-off is faster than the transparency window admits "
         "(margin < 1)");
  }
  const StorageEfficiency eta =
      storage_efficiency(pulse, report.transparency_bandwidth,
                         report.compressed_length, ensemble.length,
                         report.adiabaticity_margin);
  report.eta_bandwidth = eta.bandwidth_factor;
  report.eta_fit = eta.fit_factor;
  report.eta_adiabatic = eta.adiabatic_factor;
  report.eta_storage = eta.total;
  return report;
}

}  // namespace polcount
