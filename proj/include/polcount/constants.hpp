#pragma once

namespace polcount {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Time-bandwidth product of a transform-limited Gaussian pulse,
// FWHM(intensity) x FWHM(spectrum in ordinary frequency).
inline constexpr double kGaussianTimeBandwidthFwhm = 0.44;

// All frequencies and rates are carried as angular quantities (rad/s)
// internally; Hz appears only at the I/O boundary.
inline constexpr double hz_to_angular(double f_hz) { return kTwoPi * f_hz; }
inline constexpr double angular_to_hz(double omega) { return omega / kTwoPi; }

}  // namespace polcount
