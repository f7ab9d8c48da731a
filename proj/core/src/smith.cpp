#include "histcl/smith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "histcl/error.hpp"
#include "histcl/normal.hpp"

namespace histcl {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

void SiteLayout::validate() const {
    if (sites.size() < 2) throw data_error("site layout needs at least 2 sites");
    std::set<std::string> ids;
    for (const Site& s : sites) {
        if (!std::isfinite(s.x) || !std::isfinite(s.y))
            throw data_error("site '" + s.id + "' has non-finite coordinates");
        if (!ids.insert(s.id).second) throw data_error("duplicate site id '" + s.id + "'");
    }
}

void SmithParams::validate() const {
    if (!dependence_valid()) throw numeric_error("Smith dependence matrix is not positive definite");
}

double mahalanobis_sq(const SmithParams& params, const Site& t1, const Site& t2) {
    double dx = t1.x - t2.x, dy = t1.y - t2.y;
    return (params.s22 * dx * dx - 2.0 * params.s12 * dx * dy + params.s11 * dy * dy) / params.det();
}

PairCdf::PairCdf(const SmithParams& params, const SiteLayout& layout, std::size_t site1,
                 std::size_t site2) {
    params.validate();
    if (site1 == site2) throw data_error("PairCdf: sites must be distinct");
    double a2 = mahalanobis_sq(params, layout[site1], layout[site2]);
    if (!(a2 > 0.0)) throw numeric_error("PairCdf: coincident sites");
    a_ = std::sqrt(a2);
    half_a_ = a_ / 2.0;
    inv_a_ = 1.0 / a_;
    m1_ = margin_at(site1, params.margins, layout);
    m2_ = margin_at(site2, params.margins, layout);
}

double PairCdf::from_transformed(double z1, double lz1, double z2, double lz2) const {
    if (z1 == inf || z2 == inf) return 0.0;  // below a lower endpoint
    double s = 0.0;
    if (z1 > 0.0) s += z1 * std_normal_cdf(half_a_ + (lz1 - lz2) * inv_a_);
    if (z2 > 0.0) s += z2 * std_normal_cdf(half_a_ + (lz2 - lz1) * inv_a_);
    return std::exp(-s);
}

double PairCdf::operator()(double y1, double y2) const {
    return from_transformed(gev_v(y1, m1_), gev_log_v(y1, m1_), gev_v(y2, m2_), gev_log_v(y2, m2_));
}

TripleCdf::TripleCdf(const SmithParams& params, const SiteLayout& layout,
                     const std::array<std::size_t, 3>& sites) {
    params.validate();
    if (sites[0] == sites[1] || sites[0] == sites[2] || sites[1] == sites[2])
        throw data_error("TripleCdf: sites must be distinct");
    for (std::size_t i = 0; i < 3; ++i) m_[i] = margin_at(sites[i], params.margins, layout);

    double det = params.det();
    auto quad = [&](const Site& u, const Site& v) {
        // u' Sigma^-1 v
        return (params.s22 * u.x * v.x - params.s12 * (u.x * v.y + u.y * v.x) +
                params.s11 * u.y * v.y) /
               det;
    };
    for (std::size_t j = 0; j < 3; ++j) {
        std::size_t p = (j == 0) ? 1 : 0;
        std::size_t q = (j == 2) ? 1 : 2;
        Site dp{"", layout[sites[j]].x - layout[sites[p]].x, layout[sites[j]].y - layout[sites[p]].y};
        Site dq{"", layout[sites[j]].x - layout[sites[q]].x, layout[sites[j]].y - layout[sites[q]].y};
        double m11 = quad(dp, dp), m22 = quad(dq, dq), m12 = quad(dp, dq);
        if (!(m11 > 0.0) || !(m22 > 0.0)) throw numeric_error("TripleCdf: coincident sites");

        // near-singular conditional covariance: collinear sites
        double tr = m11 + m22;
        double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - (m11 * m22 - m12 * m12)));
        double lmin = tr / 2.0 - disc, lmax = tr / 2.0 + disc;
        if (!(lmin > 0.0) || lmax / lmin > 1e12) {
            m11 += 1e-10 * tr;
            m22 += 1e-10 * tr;
            jittered_ = true;
        }

        Term& term = terms_[j];
        term.p = p;
        term.q = q;
        term.half_a2_p = m11 / 2.0;
        term.half_a2_q = m22 / 2.0;
        term.inv_s_p = 1.0 / std::sqrt(m11);
        term.inv_s_q = 1.0 / std::sqrt(m22);
        term.rho = std::clamp(m12 / std::sqrt(m11 * m22), -1.0, 1.0);
    }
}

double TripleCdf::from_transformed(const std::array<double, 3>& z,
                                   const std::array<double, 3>& lz) const {
    if (z[0] == inf || z[1] == inf || z[2] == inf) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        if (!(z[j] > 0.0)) continue;
        const Term& t = terms_[j];
        double hp = (t.half_a2_p + lz[j] - lz[t.p]) * t.inv_s_p;
        double hq = (t.half_a2_q + lz[j] - lz[t.q]) * t.inv_s_q;
        s += z[j] * bivariate_normal_cdf(hp, hq, t.rho);
    }
    return std::exp(-s);
}

double TripleCdf::operator()(double y1, double y2, double y3) const {
    std::array<double, 3> y{y1, y2, y3};
    std::array<double, 3> z, lz;
    for (std::size_t i = 0; i < 3; ++i) {
        z[i] = gev_v(y[i], m_[i]);
        lz[i] = gev_log_v(y[i], m_[i]);
    }
    return from_transformed(z, lz);
}

double smith_cdf(std::span<const double> y, std::span<const std::size_t> sites,
                 const SmithParams& params, const SiteLayout& layout) {
    if (y.size() != sites.size()) throw data_error("smith_cdf: y/sites size mismatch");
    if (y.size() == 2) {
        PairCdf f(params, layout, sites[0], sites[1]);
        return f(y[0], y[1]);
    }
    if (y.size() == 3) {
        TripleCdf f(params, layout, {sites[0], sites[1], sites[2]});
        return f(y[0], y[1], y[2]);
    }
    throw data_error("smith_cdf: only 2- and 3-site subsets are supported");
}

double extremal_coefficient(std::size_t site1, std::size_t site2, const SmithParams& params,
                            const SiteLayout& layout) {
    params.validate();
    if (site1 == site2) throw data_error("extremal_coefficient: sites must be distinct");
    double a2 = mahalanobis_sq(params, layout[site1], layout[site2]);
    if (!(a2 > 0.0)) throw numeric_error("extremal_coefficient: coincident sites");
    return 2.0 * std_normal_cdf(std::sqrt(a2) / 2.0);
}

}  // namespace histcl
