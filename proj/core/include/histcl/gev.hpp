#pragma once

#include <cstddef>
#include <variant>

#include "histcl/sites.hpp"

namespace histcl {

/// Shapes closer to zero than this are evaluated on the Gumbel branch,
/// which is where the (1 + xi*z)^(-1/xi) form cancels catastrophically.
inline constexpr double gumbel_xi_eps = 1e-12;

struct GevParams {
    double mu = 0.0;
    double sigma = 1.0;
    double xi = 0.0;
};

/// v(y) = (1 + xi*(y-mu)/sigma)_+^(-1/xi), the exponent of the GEV
/// distribution function exp(-v). Returns +inf below the lower endpoint
/// (xi > 0) and 0 above the upper endpoint (xi < 0).
double gev_v(double y, double mu, double sigma, double xi);

/// log of gev_v, computed directly in log space; -inf and +inf at the
/// respective support endpoints.
double gev_log_v(double y, double mu, double sigma, double xi);

double gev_cdf(double y, double mu, double sigma, double xi);

/// Exact inverse of gev_cdf on p in (0, 1).
double gev_quantile(double p, double mu, double sigma, double xi);

inline double gev_v(double y, const GevParams& g) { return gev_v(y, g.mu, g.sigma, g.xi); }
inline double gev_log_v(double y, const GevParams& g) { return gev_log_v(y, g.mu, g.sigma, g.xi); }
inline double gev_cdf(double y, const GevParams& g) { return gev_cdf(y, g.mu, g.sigma, g.xi); }
inline double gev_quantile(double p, const GevParams& g) { return gev_quantile(p, g.mu, g.sigma, g.xi); }

struct ConstantMargins {
    double mu = 0.0;
    double sigma = 1.0;
    double xi = 0.0;
};

/// mu(k) and sigma(k) are linear in the site coordinates, xi is shared:
/// mu(k) = a0 + a1*x(k) + a2*y(k), sigma(k) = b0 + b1*x(k) + b2*y(k).
struct SpatiallyVaryingMargins {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double xi = 0.0;
};

using MarginSpec = std::variant<ConstantMargins, SpatiallyVaryingMargins>;

/// Evaluated margin at a site; throws numeric_error when sigma(k) <= 0.
GevParams margin_at(std::size_t site, const MarginSpec& margins, const SiteLayout& layout);

/// True when sigma(k) > 0 at every site, without throwing.
bool margins_valid(const MarginSpec& margins, const SiteLayout& layout);

}  // namespace histcl
