#include "histcl/simulate.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "histcl/error.hpp"
#include "histcl/gev.hpp"
#include "histcl/parallel.hpp"
#include "histcl/rng.hpp"

namespace histcl {

namespace {
constexpr std::uint64_t kSiteStream = 0x5349544553ULL;   // domain separation tags
constexpr std::uint64_t kRowStream = 0x524f5753ULL;
constexpr double two_pi = 6.283185307179586476925286766559;
}  // namespace

void SimConfig::validate() const {
    if (K < 2) throw data_error("simulate: K must be >= 2");
    if (N < 1) throw data_error("simulate: N must be >= 1");
    if (!(window[1] > window[0]) || !(window[3] > window[2]))
        throw data_error("simulate: degenerate window");
    if (!(storm_window_expansion > 0)) throw data_error("simulate: expansion must be positive");
    params.validate();
}

SiteLayout sample_sites(const SimConfig& config) {
    config.validate();
    Rng rng = Rng::stream(config.seed, kSiteStream);
    SiteLayout layout;
    layout.sites.reserve(config.K);
    for (std::size_t k = 0; k < config.K; ++k) {
        Site s;
        s.id = "S" + std::to_string(k + 1);
        s.x = rng.uniform(config.window[0], config.window[1]);
        s.y = rng.uniform(config.window[2], config.window[3]);
        layout.sites.push_back(std::move(s));
    }
    layout.validate();
    return layout;
}

Matrix simulate_smith(const SiteLayout& layout, const SimConfig& config) {
    config.validate();
    layout.validate();
    const SmithParams& p = config.params;
    const std::size_t K = layout.size();

    double det = p.det();
    double half_tr = (p.s11 + p.s22) / 2.0;
    double lambda_max = half_tr + std::sqrt(half_tr * half_tr - det);
    double radius = config.storm_window_expansion * std::sqrt(lambda_max);

    double x_lo = config.window[0] - radius, x_hi = config.window[1] + radius;
    double y_lo = config.window[2] - radius, y_hi = config.window[3] + radius;
    double area = (x_hi - x_lo) * (y_hi - y_lo);
    double phi_max = 1.0 / (two_pi * std::sqrt(det));

    // storm profile: centered bivariate normal density with covariance Sigma
    auto phi = [&](double dx, double dy) {
        double q = (p.s22 * dx * dx - 2.0 * p.s12 * dx * dy + p.s11 * dy * dy) / det;
        return phi_max * std::exp(-q / 2.0);
    };

    std::vector<GevParams> margins(K);
    for (std::size_t k = 0; k < K; ++k) margins[k] = margin_at(k, p.margins, layout);

    Matrix out(config.N, K);
    parallel::for_index(config.N, [&](std::size_t row) {
        Rng rng = Rng::stream(config.seed, kRowStream, row);
        std::vector<double> z(K, 0.0);
        double e_sum = 0.0;
        for (;;) {
            e_sum += rng.exponential();
            double zeta = area / e_sum;
            double z_min = z[0];
            for (std::size_t k = 1; k < K; ++k) z_min = std::min(z_min, z[k]);
            if (z_min > 0.0 && zeta * phi_max < z_min) break;
            double ux = rng.uniform(x_lo, x_hi);
            double uy = rng.uniform(y_lo, y_hi);
            for (std::size_t k = 0; k < K; ++k)
                z[k] = std::max(z[k], zeta * phi(layout[k].x - ux, layout[k].y - uy));
        }
        // unit Frechet -> requested margins
        for (std::size_t k = 0; k < K; ++k) {
            const GevParams& g = margins[k];
            double lz = std::log(z[k]);
            out(row, k) = std::fabs(g.xi) < gumbel_xi_eps
                              ? g.mu + g.sigma * lz
                              : g.mu + g.sigma * std::expm1(g.xi * lz) / g.xi;
        }
    });
    return out;
}

}  // namespace histcl
