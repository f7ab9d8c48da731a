#include "histcl/gev.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "histcl/error.hpp"

namespace histcl {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

void check_sigma(double sigma) {
    if (!(sigma > 0.0)) throw numeric_error("gev: sigma must be positive");
}
}  // namespace

double gev_v(double y, double mu, double sigma, double xi) {
    check_sigma(sigma);
    double z = (y - mu) / sigma;
    if (std::fabs(xi) < gumbel_xi_eps) return std::exp(-z);
    double t = xi * z;
    if (t <= -1.0) return xi > 0.0 ? inf : 0.0;
    return std::exp(-std::log1p(t) / xi);
}

double gev_log_v(double y, double mu, double sigma, double xi) {
    check_sigma(sigma);
    double z = (y - mu) / sigma;
    if (std::fabs(xi) < gumbel_xi_eps) return -z;
    double t = xi * z;
    if (t <= -1.0) return xi > 0.0 ? inf : -inf;
    return -std::log1p(t) / xi;
}

double gev_cdf(double y, double mu, double sigma, double xi) {
    return std::exp(-gev_v(y, mu, sigma, xi));
}

double gev_quantile(double p, double mu, double sigma, double xi) {
    check_sigma(sigma);
    if (!(p > 0.0 && p < 1.0)) throw numeric_error("gev_quantile: p must be in (0,1)");
    double w = -std::log(p);  // target v
    if (std::fabs(xi) < gumbel_xi_eps) return mu - sigma * std::log(w);
    return mu + sigma * std::expm1(-xi * std::log(w)) / xi;
}

GevParams margin_at(std::size_t site, const MarginSpec& margins, const SiteLayout& layout) {
    if (site >= layout.size()) throw data_error("margin_at: site index out of range");
    if (const auto* c = std::get_if<ConstantMargins>(&margins)) {
        if (!(c->sigma > 0.0)) throw numeric_error("margin_at: sigma <= 0");
        return {c->mu, c->sigma, c->xi};
    }
    const auto& s = std::get<SpatiallyVaryingMargins>(margins);
    const Site& loc = layout[site];
    double mu = s.a0 + s.a1 * loc.x + s.a2 * loc.y;
    double sigma = s.b0 + s.b1 * loc.x + s.b2 * loc.y;
    if (!(sigma > 0.0))
        throw numeric_error("margin_at: sigma(k) <= 0 at site '" + loc.id + "'");
    return {mu, sigma, s.xi};
}

bool margins_valid(const MarginSpec& margins, const SiteLayout& layout) {
    if (const auto* c = std::get_if<ConstantMargins>(&margins)) return c->sigma > 0.0;
    const auto& s = std::get<SpatiallyVaryingMargins>(margins);
    for (const Site& loc : layout.sites)
        if (!(s.b0 + s.b1 * loc.x + s.b2 * loc.y > 0.0)) return false;
    return true;
}

}  // namespace histcl
