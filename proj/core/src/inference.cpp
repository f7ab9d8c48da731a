#include "histcl/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>

#include "histcl/error.hpp"
#include "histcl/normal.hpp"

namespace histcl {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double euler_gamma = 0.5772156649015329;

std::vector<double> hessian_steps(const ParamVector& at) {
    std::vector<double> h(at.size());
    for (std::size_t i = 0; i < at.size(); ++i)
        h[i] = std::max(1e-4 * std::fabs(at.values[i]), 1e-5);
    return h;
}

ParamVector shifted(const ParamVector& at, std::size_t i, double delta) {
    ParamVector out = at;
    out.values[i] += delta;
    return out;
}
}  // namespace

FitResult fit(const LogLikFn& objective, const ParamVector& theta0, const FitOptions& opts) {
    LogLikValue at0 = objective(theta0);
    if (!std::isfinite(at0.value)) throw numeric_error("fit: objective not finite at theta0");

    MarginModel model = theta0.margin_model;
    std::vector<double> u0 = to_unconstrained(theta0);
    auto neg = [&](std::span<const double> u) {
        return -objective(from_unconstrained(model, u)).value;
    };
    NmOptions nm_opts;
    nm_opts.tol = opts.tol;
    nm_opts.max_iter = opts.max_iter;
    NmResult nm = nelder_mead(neg, u0, nm_opts);

    // restart with a fresh simplex until no further improvement; guards
    // against premature simplex collapse on narrow valleys
    int used = nm.iterations;
    while (used < opts.max_iter) {
        NmOptions round = nm_opts;
        round.max_iter = opts.max_iter - used;
        NmResult again = nelder_mead(neg, nm.x, round);
        used += again.iterations;
        bool improved = again.fx < nm.fx - opts.tol * (1.0 + std::fabs(nm.fx));
        if (again.fx < nm.fx) {
            again.iterations = used;
            nm = again;
        } else {
            nm.iterations = used;
        }
        if (!improved) break;
    }

    FitResult res;
    res.theta_hat = from_unconstrained(model, nm.x);
    res.iterations = nm.iterations;
    res.converged = nm.converged;
    LogLikValue at_hat = objective(res.theta_hat);
    res.loglik = at_hat.value;
    res.floored_bins = at_hat.floored_bins;
    return res;
}

std::vector<double> numerical_hessian(const std::function<double(const ParamVector&)>& f,
                                      const ParamVector& at) {
    std::size_t p = at.size();
    std::vector<double> h = hessian_steps(at);
    std::vector<double> H(p * p, 0.0);
    double f0 = f(at);

    for (std::size_t i = 0; i < p; ++i) {
        double fp = f(shifted(at, i, h[i]));
        double fm = f(shifted(at, i, -h[i]));
        H[i * p + i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            ParamVector pp = shifted(shifted(at, i, h[i]), j, h[j]);
            ParamVector pm = shifted(shifted(at, i, h[i]), j, -h[j]);
            ParamVector mp = shifted(shifted(at, i, -h[i]), j, h[j]);
            ParamVector mm = shifted(shifted(at, i, -h[i]), j, -h[j]);
            double v = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j]);
            H[i * p + j] = v;
            H[j * p + i] = v;
        }
    for (double v : H)
        if (!std::isfinite(v)) throw numeric_error("numerical_hessian: non-finite entry");
    return H;
}

namespace {
template <typename Objective>
std::vector<double> h_hat_impl(const Objective& objective, const ParamVector& at) {
    auto f = [&](const ParamVector& theta) { return objective.value(theta.to_smith()).value; };
    std::vector<double> H = numerical_hessian(f, at);
    for (double& v : H) v = -v;
    return H;
}

// central-difference score per unit (histogram or observation), then the
// sum of outer products
template <typename PerUnitFn>
std::vector<double> score_outer_products(const PerUnitFn& per_unit, const ParamVector& at,
                                         std::size_t units) {
    std::size_t p = at.size();
    std::vector<double> h = hessian_steps(at);
    std::vector<std::vector<double>> score(p);
    for (std::size_t i = 0; i < p; ++i) {
        std::vector<double> up = per_unit(shifted(at, i, h[i]));
        std::vector<double> dn = per_unit(shifted(at, i, -h[i]));
        score[i].resize(units);
        for (std::size_t t = 0; t < units; ++t) {
            score[i][t] = (up[t] - dn[t]) / (2.0 * h[i]);
            if (!std::isfinite(score[i][t])) throw numeric_error("j_hat: non-finite score");
        }
    }
    std::vector<double> J(p * p, 0.0);
    for (std::size_t t = 0; t < units; ++t)
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) J[i * p + j] += score[i][t] * score[j][t];
    return J;
}
}  // namespace

std::vector<double> h_hat(const SymbolicObjective& objective, const ParamVector& at) {
    return h_hat_impl(objective, at);
}

std::vector<double> h_hat(const ClassicObjective& objective, const ParamVector& at) {
    return h_hat_impl(objective, at);
}

std::vector<double> j_hat(const SymbolicObjective& objective, const ParamVector& at) {
    auto per_unit = [&](const ParamVector& theta) {
        return objective.per_histogram(theta.to_smith());
    };
    return score_outer_products(per_unit, at, objective.histogram_count());
}

std::vector<double> j_hat_classic(const ClassicObjective& objective, const ParamVector& at) {
    auto per_unit = [&](const ParamVector& theta) { return objective.per_row(theta.to_smith()); };
    return score_outer_products(per_unit, at, objective.row_count());
}

GodambeResult godambe(const std::vector<double>& H, const std::vector<double>& J, std::size_t p) {
    if (H.size() != p * p || J.size() != p * p) throw data_error("godambe: bad matrix size");
    using Mat = Eigen::MatrixXd;
    Eigen::Map<const Mat> Hm(H.data(), p, p);
    Eigen::Map<const Mat> Jm(J.data(), p, p);

    Eigen::FullPivLU<Mat> luH(Hm);
    if (!luH.isInvertible()) throw numeric_error("godambe: singular sensitivity matrix");

    // variance of theta-hat: H^-1 J H^-1 (both H and J are totals over t)
    Mat HinvJ = luH.solve(Jm);
    Mat var = luH.solve(HinvJ.transpose()).transpose();
    var = ((var + var.transpose()) / 2.0).eval();

    GodambeResult out;
    out.std_errors.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        double v = var(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        if (v < -1e-10) throw numeric_error("godambe: negative variance diagonal");
        out.std_errors[i] = std::sqrt(std::max(0.0, v));
    }

    // G = H J^-1 H computed through a solve, never an explicit inverse
    Eigen::FullPivLU<Mat> luJ(Jm);
    Mat G = Hm * luJ.solve(Hm);
    G = ((G + G.transpose()) / 2.0).eval();
    out.g_hat.assign(G.data(), G.data() + p * p);
    return out;
}

GodambeResult godambe_blocked(const std::vector<double>& H, const std::vector<double>& J,
                              std::size_t p, double block_size) {
    if (!(block_size >= 1.0)) throw data_error("godambe_blocked: block_size must be >= 1");
    std::vector<double> scaled = J;
    for (double& v : scaled) v *= block_size;
    return godambe(H, scaled, p);
}

double return_level(const GevParams& margin, double years, double blocks_per_year) {
    if (!(years >= 1.0) || !(blocks_per_year >= 1.0))
        throw data_error("return_level: years and blocks_per_year must be >= 1");
    return gev_quantile(1.0 - 1.0 / (years * blocks_per_year), margin);
}

std::vector<std::pair<double, double>> gev_qq(std::vector<double> sample, const GevParams& margin) {
    if (sample.size() < 2) throw data_error("gev_qq: need at least 2 values");
    std::sort(sample.begin(), sample.end());
    std::size_t n = sample.size();
    std::vector<std::pair<double, double>> out(n);
    for (std::size_t r = 0; r < n; ++r) {
        double p = (static_cast<double>(r) + 0.5) / static_cast<double>(n);
        out[r] = {sample[r], gev_quantile(p, margin)};
    }
    return out;
}

namespace {

// Least squares for Sigma from pairwise Mahalanobis distances implied by
// empirical extremal coefficients: theta_ij = 2 Phi(a_ij / 2) inverts to
// a_ij, and a_ij^2 = d' Sigma^-1 d is linear in the entries of Sigma^-1.
// Falls back to the coordinate-spread diagonal when the solve degenerates.
bool dependence_from_extremal(const std::vector<double>& theta_ext,
                              const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                              const SiteLayout& layout, double& s11, double& s12, double& s22) {
    Eigen::MatrixXd X(pairs.size(), 3);
    Eigen::VectorXd y(pairs.size());
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        double th = std::clamp(theta_ext[r], 1.02, 1.98);
        double a = 2.0 * std_normal_quantile(th / 2.0);
        double dx = layout[pairs[r].first].x - layout[pairs[r].second].x;
        double dy = layout[pairs[r].first].y - layout[pairs[r].second].y;
        X(r, 0) = dx * dx;
        X(r, 1) = 2.0 * dx * dy;
        X(r, 2) = dy * dy;
        y(r) = a * a;
    }
    Eigen::Vector3d q = X.colPivHouseholderQr().solve(y);
    double det = q(0) * q(2) - q(1) * q(1);
    if (!(q(0) > 0.0) || !(q(2) > 0.0) || !(det > 0.0)) return false;
    double t11 = q(2) / det, t12 = -q(1) / det, t22 = q(0) / det;
    if (!std::isfinite(t11) || !std::isfinite(t12) || !std::isfinite(t22)) return false;
    s11 = t11;
    s12 = t12;
    s22 = t22;
    return true;
}

// Gumbel method-of-moments margins plus the dependence start above.
ParamVector build_guess(const std::vector<double>& mean_k, const std::vector<double>& var_k,
                        const std::vector<double>& theta_ext,
                        const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                        const SiteLayout& layout, MarginModel model) {
    std::size_t K = layout.size();
    std::vector<double> mu_k(K), sg_k(K);
    for (std::size_t k = 0; k < K; ++k) {
        double sg = std::sqrt(std::max(var_k[k], 1e-12) * 6.0) / M_PI;
        sg_k[k] = sg;
        mu_k[k] = mean_k[k] - euler_gamma * sg;
    }

    double mx = 0, my = 0;
    for (const Site& s : layout.sites) {
        mx += s.x / static_cast<double>(K);
        my += s.y / static_cast<double>(K);
    }
    double vx = 0, vy = 0;
    for (const Site& s : layout.sites) {
        vx += (s.x - mx) * (s.x - mx) / static_cast<double>(K);
        vy += (s.y - my) * (s.y - my) / static_cast<double>(K);
    }
    if (!(vx > 0)) vx = 1.0;
    if (!(vy > 0)) vy = 1.0;
    double s11 = vx, s12 = 0.0, s22 = vy;
    if (!theta_ext.empty()) dependence_from_extremal(theta_ext, pairs, layout, s11, s12, s22);

    ParamVector theta;
    theta.margin_model = model;
    if (model == MarginModel::constant) {
        double mu = 0, sg = 0;
        for (std::size_t k = 0; k < K; ++k) {
            mu += mu_k[k] / static_cast<double>(K);
            sg += sg_k[k] / static_cast<double>(K);
        }
        theta.values = {s11, s12, s22, mu, sg, 0.0};
        return theta;
    }

    // least squares of the per-site margins on (1, x, y)
    Eigen::MatrixXd X(K, 3);
    Eigen::VectorXd ym(K), ys(K);
    for (std::size_t k = 0; k < K; ++k) {
        X(k, 0) = 1.0;
        X(k, 1) = layout[k].x;
        X(k, 2) = layout[k].y;
        ym(k) = mu_k[k];
        ys(k) = sg_k[k];
    }
    Eigen::Vector3d alpha = X.colPivHouseholderQr().solve(ym);
    Eigen::Vector3d beta = X.colPivHouseholderQr().solve(ys);
    bool ok = true;
    for (std::size_t k = 0; k < K; ++k)
        if (!(beta(0) + beta(1) * layout[k].x + beta(2) * layout[k].y > 0)) ok = false;
    if (!ok) {
        double sg = 0;
        for (std::size_t k = 0; k < K; ++k) sg += sg_k[k] / static_cast<double>(K);
        beta << sg, 0.0, 0.0;
    }
    theta.values = {s11, s12, s22, alpha(0), alpha(1), alpha(2), beta(0), beta(1), beta(2), 0.0};
    return theta;
}

}  // namespace

ParamVector initial_guess(const HistogramSeries& series, const SiteLayout& layout,
                          MarginModel model) {
    if (layout.size() != series.grid->dims()) throw data_error("initial_guess: layout/grid mismatch");
    SparseHistogram pooled = merge(series);
    std::size_t K = layout.size();
    double n = static_cast<double>(pooled.total);
    std::vector<double> mean_k(K, 0.0), var_k(K, 0.0);
    // per-margin moments and mid-bin Frechet transforms z = -1/log(F)
    std::vector<std::vector<double>> zmid(K);
    for (std::size_t k = 0; k < K; ++k) {
        MarginalHistogram m = marginalize(pooled, {k});
        const auto& breaks = series.grid->breakpoints(k);
        double mean = 0.0, sq = 0.0, cum = 0.0;
        zmid[k].assign(m.counts.size(), 1.0);
        for (std::size_t b = 0; b < m.counts.size(); ++b) {
            double cnt = static_cast<double>(m.counts[b]);
            if (cnt > 0) {
                double mid = (breaks[b] + breaks[b + 1]) / 2.0;
                mean += cnt * mid / n;
                sq += cnt * mid * mid / n;
                double F = std::clamp((cum + 0.5 * cnt) / n, 1e-9, 1.0 - 1e-9);
                zmid[k][b] = -1.0 / std::log(F);
            }
            cum += cnt;
        }
        mean_k[k] = mean;
        var_k[k] = sq - mean * mean;
    }
    // empirical extremal coefficient per pair: 1/mean(1/max(z_i, z_j))
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<double> theta_ext;
    for (std::size_t i = 0; i + 1 < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j) {
            MarginalHistogram m = marginalize(pooled, {i, j});
            double acc = 0.0;
            for (std::size_t b1 = 0; b1 < m.shape[0]; ++b1)
                for (std::size_t b2 = 0; b2 < m.shape[1]; ++b2) {
                    double cnt = static_cast<double>(m.counts[b1 * m.shape[1] + b2]);
                    if (cnt > 0) acc += cnt / std::max(zmid[i][b1], zmid[j][b2]);
                }
            pairs.emplace_back(i, j);
            theta_ext.push_back(n / acc);
        }
    return build_guess(mean_k, var_k, theta_ext, pairs, layout, model);
}

ParamVector initial_guess_micro(const Matrix& data, const SiteLayout& layout, MarginModel model) {
    if (layout.size() != data.cols) throw data_error("initial_guess_micro: layout/data mismatch");
    if (data.rows == 0) throw data_error("initial_guess_micro: empty data");
    std::size_t K = data.cols;
    double n = static_cast<double>(data.rows);
    std::vector<double> mean_k(K, 0.0), var_k(K, 0.0);
    Matrix z(data.rows, K);  // rank-based Frechet transforms
    std::vector<std::size_t> idx(data.rows);
    for (std::size_t k = 0; k < K; ++k) {
        double mean = 0.0, sq = 0.0;
        for (std::size_t r = 0; r < data.rows; ++r) {
            mean += data(r, k) / n;
            sq += data(r, k) * data(r, k) / n;
        }
        mean_k[k] = mean;
        var_k[k] = sq - mean * mean;

        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return data(a, k) < data(b, k); });
        for (std::size_t r = 0; r < data.rows; ++r) {
            double F = (static_cast<double>(r) + 0.5) / n;
            z(idx[r], k) = -1.0 / std::log(F);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<double> theta_ext;
    for (std::size_t i = 0; i + 1 < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < data.rows; ++r) acc += 1.0 / std::max(z(r, i), z(r, j));
            pairs.emplace_back(i, j);
            theta_ext.push_back(n / acc);
        }
    return build_guess(mean_k, var_k, theta_ext, pairs, layout, model);
}

}  // namespace histcl
