#pragma once

namespace histcl {

/// Standard normal distribution function; |error| < 1e-10 over the reals.
/// Inputs outside [-40, 40] (including infinities) saturate to 0 or 1.
double std_normal_cdf(double x);

/// Inverse of std_normal_cdf on p in (0, 1).
double std_normal_quantile(double p);

/// Zero-mean unit-variance bivariate normal distribution function
/// P(X <= h, Y <= k) with correlation rho, |error| well below 1e-8.
/// Coordinates saturate like std_normal_cdf; rho = +-1 degenerates to the
/// min/max cases. Throws numeric_error for |rho| > 1.
double bivariate_normal_cdf(double h, double k, double rho);

}  // namespace histcl
