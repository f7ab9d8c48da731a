#include "histcl/transform.hpp"

#include <cmath>

#include "histcl/error.hpp"

namespace histcl {

std::size_t param_count(MarginModel model) {
    return model == MarginModel::constant ? 6 : 10;
}

SmithParams ParamVector::to_smith() const {
    if (values.size() != param_count(margin_model))
        throw data_error("ParamVector: wrong number of values");
    SmithParams p;
    p.s11 = values[0];
    p.s12 = values[1];
    p.s22 = values[2];
    if (margin_model == MarginModel::constant)
        p.margins = ConstantMargins{values[3], values[4], values[5]};
    else
        p.margins = SpatiallyVaryingMargins{values[3], values[4], values[5],
                                            values[6], values[7], values[8], values[9]};
    return p;
}

std::vector<std::string> ParamVector::names() const {
    if (margin_model == MarginModel::constant)
        return {"sigma11", "sigma12", "sigma22", "mu", "sigma", "xi"};
    return {"sigma11", "sigma12", "sigma22", "alpha0", "alpha1", "alpha2",
            "beta0",   "beta1",   "beta2",   "xi"};
}

ParamVector params_from_smith(const SmithParams& params) {
    ParamVector out;
    if (const auto* c = std::get_if<ConstantMargins>(&params.margins)) {
        out.margin_model = MarginModel::constant;
        out.values = {params.s11, params.s12, params.s22, c->mu, c->sigma, c->xi};
    } else {
        const auto& s = std::get<SpatiallyVaryingMargins>(params.margins);
        out.margin_model = MarginModel::spatially_varying;
        out.values = {params.s11, params.s12, params.s22, s.a0, s.a1, s.a2,
                      s.b0,       s.b1,       s.b2,       s.xi};
    }
    return out;
}

std::vector<double> to_unconstrained(const ParamVector& theta) {
    const auto& v = theta.values;
    if (v.size() != param_count(theta.margin_model))
        throw data_error("to_unconstrained: wrong number of values");
    if (!(v[0] > 0.0) || !(v[0] * v[2] - v[1] * v[1] > 0.0))
        throw numeric_error("to_unconstrained: dependence matrix not positive definite");
    double l11 = std::sqrt(v[0]);
    double l21 = v[1] / l11;
    double l22 = std::sqrt(v[2] - l21 * l21);

    std::vector<double> u;
    u.reserve(v.size());
    u.push_back(std::log(l11));
    u.push_back(l21);
    u.push_back(std::log(l22));
    if (theta.margin_model == MarginModel::constant) {
        if (!(v[4] > 0.0)) throw numeric_error("to_unconstrained: sigma <= 0");
        u.push_back(v[3]);
        u.push_back(std::log(v[4]));
        u.push_back(v[5]);
    } else {
        if (!(v[6] > 0.0)) throw numeric_error("to_unconstrained: beta0 <= 0");
        u.push_back(v[3]);
        u.push_back(v[4]);
        u.push_back(v[5]);
        u.push_back(std::log(v[6]));
        u.push_back(v[7]);
        u.push_back(v[8]);
        u.push_back(v[9]);
    }
    return u;
}

ParamVector from_unconstrained(MarginModel model, std::span<const double> u) {
    if (u.size() != param_count(model)) throw data_error("from_unconstrained: wrong size");
    double l11 = std::exp(u[0]);
    double l21 = u[1];
    double l22 = std::exp(u[2]);

    ParamVector out;
    out.margin_model = model;
    out.values.reserve(u.size());
    out.values.push_back(l11 * l11);
    out.values.push_back(l11 * l21);
    out.values.push_back(l21 * l21 + l22 * l22);
    if (model == MarginModel::constant) {
        out.values.push_back(u[3]);
        out.values.push_back(std::exp(u[4]));
        out.values.push_back(u[5]);
    } else {
        out.values.push_back(u[3]);
        out.values.push_back(u[4]);
        out.values.push_back(u[5]);
        out.values.push_back(std::exp(u[6]));
        out.values.push_back(u[7]);
        out.values.push_back(u[8]);
        out.values.push_back(u[9]);
    }
    return out;
}

}  // namespace histcl
