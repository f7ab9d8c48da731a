#pragma once

#include <span>
#include <string>
#include <vector>

#include "histcl/smith.hpp"

namespace histcl {

enum class MarginModel { constant, spatially_varying };

/// Free parameters on the natural scale, ordered (s11, s12, s22, margins...).
/// Constant margins append (mu, sigma, xi); spatially varying margins append
/// (a0, a1, a2, b0, b1, b2, xi).
struct ParamVector {
    MarginModel margin_model = MarginModel::constant;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    SmithParams to_smith() const;
    std::vector<std::string> names() const;
};

std::size_t param_count(MarginModel model);
ParamVector params_from_smith(const SmithParams& params);

/// Bijection to unconstrained coordinates: log-Cholesky for the dependence
/// matrix, log for the leading scale parameter, identity elsewhere. The
/// inverse always yields a positive-definite dependence matrix.
std::vector<double> to_unconstrained(const ParamVector& theta);
ParamVector from_unconstrained(MarginModel model, std::span<const double> u);

}  // namespace histcl
