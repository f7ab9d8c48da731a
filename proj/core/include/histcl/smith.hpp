#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "histcl/gev.hpp"
#include "histcl/sites.hpp"

namespace histcl {

/// Gaussian max-stable (Smith) model: storm-shape dependence matrix
/// Sigma = [s11 s12; s12 s22] plus the marginal GEV specification.
struct SmithParams {
    double s11 = 1.0;
    double s12 = 0.0;
    double s22 = 1.0;
    MarginSpec margins = ConstantMargins{};

    bool dependence_valid() const { return s11 > 0.0 && s22 > 0.0 && s11 * s22 - s12 * s12 > 0.0; }
    void validate() const;
    double det() const { return s11 * s22 - s12 * s12; }
};

/// Squared Mahalanobis distance (t1-t2)' Sigma^-1 (t1-t2).
double mahalanobis_sq(const SmithParams& params, const Site& t1, const Site& t2);

/// Two-site joint distribution with the distance and margin work hoisted
/// out of the per-point evaluation.
class PairCdf {
public:
    PairCdf(const SmithParams& params, const SiteLayout& layout, std::size_t site1, std::size_t site2);

    double operator()(double y1, double y2) const;
    /// Evaluation from precomputed GEV transforms z = v(y), lz = log v(y).
    double from_transformed(double z1, double lz1, double z2, double lz2) const;

    double a() const { return a_; }
    const GevParams& margin1() const { return m1_; }
    const GevParams& margin2() const { return m2_; }

private:
    double a_, half_a_, inv_a_;
    GevParams m1_, m2_;
};

/// Three-site joint distribution; the three 2x2 conditional covariance
/// blocks are factored at construction.
class TripleCdf {
public:
    TripleCdf(const SmithParams& params, const SiteLayout& layout,
              const std::array<std::size_t, 3>& sites);

    double operator()(double y1, double y2, double y3) const;
    double from_transformed(const std::array<double, 3>& z, const std::array<double, 3>& lz) const;

    const GevParams& margin(std::size_t i) const { return m_[i]; }
    /// True when a near-singular conditional covariance needed diagonal jitter.
    bool jittered() const { return jittered_; }

private:
    struct Term {
        std::size_t p, q;          // the two other sites
        double half_a2_p, half_a2_q;
        double inv_s_p, inv_s_q;
        double rho;
    };
    std::array<Term, 3> terms_;
    std::array<GevParams, 3> m_;
    bool jittered_ = false;
};

/// Joint distribution function at a 2- or 3-site subset.
double smith_cdf(std::span<const double> y, std::span<const std::size_t> sites,
                 const SmithParams& params, const SiteLayout& layout);

/// 2*Phi(a/2): pairwise extremal coefficient in [1, 2].
double extremal_coefficient(std::size_t site1, std::size_t site2, const SmithParams& params,
                            const SiteLayout& layout);

}  // namespace histcl
