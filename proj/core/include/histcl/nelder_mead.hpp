#pragma once

#include <functional>
#include <span>
#include <vector>

namespace histcl {

struct NmOptions {
    double tol = 1e-8;      // relative simplex spread (both x and f)
    int max_iter = 5000;
    double initial_step_rel = 0.05;     // per-coordinate simplex offset
    double initial_step_zero = 0.00025; // offset used where x0[i] == 0
};

struct NmResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimizer. Non-finite objective values are
/// treated as +infinity, so the simplex backs away from invalid regions.
/// Deterministic: the trajectory depends only on x0 and the objective.
NmResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> x0, const NmOptions& opts = {});

}  // namespace histcl
