#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "histcl/likelihood.hpp"
#include "histcl/nelder_mead.hpp"
#include "histcl/transform.hpp"

namespace histcl {

struct FitOptions {
    double tol = 1e-8;
    int max_iter = 5000;
};

struct FitResult {
    ParamVector theta_hat;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    long long floored_bins = 0;

    // variance diagnostics, row-major p x p; empty until computed
    std::vector<double> h_hat;
    std::vector<double> j_hat;
    std::vector<double> g_hat;
    std::vector<double> std_errors;
    std::optional<std::size_t> variance_T;

    std::size_t dim() const { return theta_hat.size(); }
};

using LogLikFn = std::function<LogLikValue(const ParamVector&)>;

/// Maximizes the log-likelihood with Nelder-Mead over the unconstrained
/// parameterization. Throws numeric_error when the objective is not finite
/// at theta0; non-convergence is reported through the flag.
FitResult fit(const LogLikFn& objective, const ParamVector& theta0, const FitOptions& opts = {});

/// Central-difference Hessian in the natural parameterization, symmetrized.
/// Steps are max(1e-4*|theta_i|, 1e-5) per coordinate.
std::vector<double> numerical_hessian(const std::function<double(const ParamVector&)>& f,
                                      const ParamVector& at);

/// Sensitivity estimate: negated Hessian of the total log-likelihood.
std::vector<double> h_hat(const SymbolicObjective& objective, const ParamVector& at);
std::vector<double> h_hat(const ClassicObjective& objective, const ParamVector& at);

/// Variability estimate: sum over histograms of score outer products, the
/// scores being central differences of each histogram's tuple-summed
/// log-likelihood. With a single histogram the result has rank one.
std::vector<double> j_hat(const SymbolicObjective& objective, const ParamVector& at);

/// Classic-path variability: per-observation scores.
std::vector<double> j_hat_classic(const ClassicObjective& objective, const ParamVector& at);

struct GodambeResult {
    std::vector<double> g_hat;
    std::vector<double> std_errors;
};

/// G = H J^-1 H via solves, and standard errors sqrt(diag(H^-1 J H^-1)).
/// H and J are totals over histograms, so no additional T scaling applies.
GodambeResult godambe(const std::vector<double>& H, const std::vector<double>& J, std::size_t p);

/// Variance for block-aggregated scores. Each histogram summarizes
/// block_size observation rows; the score covariance is put on the
/// per-observation-unit scale by multiplying J with block_size before
/// sandwiching. Reported standard errors then grow as blocks coarsen and
/// shrink back to the plain godambe() values at block_size = 1 (T = N).
GodambeResult godambe_blocked(const std::vector<double>& H, const std::vector<double>& J,
                              std::size_t p, double block_size);

/// Quantile exceeded once per `years` on average, with blocks_per_year
/// block maxima per year.
double return_level(const GevParams& margin, double years, double blocks_per_year);

/// Sorted sample against GEV quantiles at plotting positions (r - 0.5)/n.
/// Pairs are (empirical, theoretical).
std::vector<std::pair<double, double>> gev_qq(std::vector<double> sample, const GevParams& margin);

/// Method-of-moments start: Gumbel moments from the pooled 1-D marginal
/// histograms (or micro columns), dependence from the squared spread of the
/// site coordinates.
ParamVector initial_guess(const HistogramSeries& series, const SiteLayout& layout, MarginModel model);
ParamVector initial_guess_micro(const Matrix& data, const SiteLayout& layout, MarginModel model);

}  // namespace histcl
