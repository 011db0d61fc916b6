#pragma once

namespace polcount {

/// ln(k!) for k >= 0. Table-backed below 4096, Stirling series above;
/// accurate to double precision everywhere.
double log_factorial(long long k);

/// ln(k!) in extended precision for tail-sensitive summations.
long double log_factorial_ld(long long k);

/// ln of the Poisson pmf P(k | mean). mean == 0 is a point mass at k == 0
/// (returns 0 for k == 0, -inf otherwise).
long double poisson_log_pmf(long long k, double mean);

/// exp of the above, evaluated in long double to keep relative error ~1e-15
/// even when the log terms individually reach 1e6.
double poisson_pmf(long long k, double mean);

/// Upper-tail standard normal quantile: z with P(Z > z) = tail, tail in (0, 0.5].
/// Bisection on erfc; used only for coarse sizing estimates.
double normal_upper_quantile(double tail);

}  // namespace polcount
