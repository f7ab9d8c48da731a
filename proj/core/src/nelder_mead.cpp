#include "histcl/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "histcl/error.hpp"

namespace histcl {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

double sanitize(double v) { return std::isnan(v) ? inf : v; }
}  // namespace

NmResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> x0, const NmOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0) throw data_error("nelder_mead: empty start point");

    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
    for (std::size_t i = 0; i < n; ++i) {
        double& xi = simplex[i + 1][i];
        xi += xi != 0.0 ? opts.initial_step_rel * std::fabs(xi) : opts.initial_step_zero;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = sanitize(f(simplex[i]));

    std::vector<std::size_t> order(n + 1);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    NmResult res;
    for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const auto& best = simplex[order[0]];
        double fbest = fv[order[0]];

        double fspread = 0.0, xspread = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            fspread = std::max(fspread, std::fabs(fv[order[i]] - fbest));
            for (std::size_t d = 0; d < n; ++d)
                xspread = std::max(xspread, std::fabs(simplex[order[i]][d] - best[d]));
        }
        double xscale = 0.0;
        for (std::size_t d = 0; d < n; ++d) xscale = std::max(xscale, std::fabs(best[d]));
        if (fspread <= opts.tol * (1.0 + std::fabs(fbest)) && xspread <= opts.tol * (1.0 + xscale)) {
            res.converged = true;
            break;
        }

        std::size_t worst = order[n];
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[order[i]][d] / static_cast<double>(n);

        auto blend = [&](std::vector<double>& out, double coef) {
            for (std::size_t d = 0; d < n; ++d)
                out[d] = centroid[d] + coef * (centroid[d] - simplex[worst][d]);
        };

        blend(xr, 1.0);  // reflection
        double fr = sanitize(f(xr));
        if (fr < fv[order[0]]) {
            blend(xe, 2.0);  // expansion
            double fe = sanitize(f(xe));
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[order[n - 1]]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        bool outside = fr < fv[worst];
        blend(xc, outside ? 0.5 : -0.5);  // contraction
        double fc = sanitize(f(xc));
        if ((outside && fc <= fr) || (!outside && fc < fv[worst])) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t i = 1; i <= n; ++i) {
            auto& v = simplex[order[i]];
            for (std::size_t d = 0; d < n; ++d) v[d] = best[d] + 0.5 * (v[d] - best[d]);
            fv[order[i]] = sanitize(f(v));
        }
    }

    std::size_t argmin = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[argmin]) argmin = i;
    res.x = simplex[argmin];
    res.fx = fv[argmin];
    return res;
}

}  // namespace histcl
