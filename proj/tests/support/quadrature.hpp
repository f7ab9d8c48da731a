#pragma once

// Test-only oracles, independent of the library's distribution-function
// implementations.

#include <cmath>
#include <functional>

namespace oracle {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double eps,
                                   int depth) {
    double m = (a + b) / 2.0;
    double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps, int depth = 40) {
    if (!(b > a)) return 0.0;
    double fa = f(a), fm = f((a + b) / 2.0), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, eps, depth);
}

inline double bivariate_normal_density(double x, double y, double rho) {
    double om = 1.0 - rho * rho;
    return std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * om)) /
           (2.0 * M_PI * std::sqrt(om));
}

/// P(X <= h, Y <= k) by nested adaptive quadrature of the density over
/// [-8.5, h] x [-8.5, k]; truncation error is below 1e-16.
inline double bivariate_normal_cdf_quadrature(double h, double k, double rho, double eps = 1e-11) {
    double hx = std::min(h, 8.5), hy = std::min(k, 8.5);
    if (hx <= -8.5 || hy <= -8.5) return 0.0;
    auto outer = [&](double x) {
        return adaptive_simpson([&](double y) { return bivariate_normal_density(x, y, rho); },
                                -8.5, hy, eps / 20.0);
    };
    return adaptive_simpson(outer, -8.5, hx, eps);
}

/// Kolmogorov asymptotic tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, sum));
}

/// One-sample KS p-value against a distribution function; sample must be sorted.
template <typename Cdf>
double ks_test_pvalue(const std::vector<double>& sorted, const Cdf& cdf) {
    std::size_t n = sorted.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double F = cdf(sorted[i]);
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - F));
        d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
    }
    double sn = std::sqrt(static_cast<double>(n));
    return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

/// Two-sample KS p-value; both samples must be sorted.
inline double ks_two_sample_pvalue(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        double fa = static_cast<double>(i) / a.size();
        double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::fabs(fa - fb));
    }
    double en = std::sqrt(static_cast<double>(a.size()) * b.size() / (a.size() + b.size()));
    return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

}  // namespace oracle
