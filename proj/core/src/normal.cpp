#include "histcl/normal.hpp"

#include <algorithm>
#include <cmath>

#include "histcl/error.hpp"

namespace histcl {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;

double saturate(double x) { return std::isnan(x) ? x : std::clamp(x, -40.0, 40.0); }

// Gauss-Legendre abscissae/weights on (-1,1), half of each symmetric rule.
constexpr double gl6_x[3] = {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
constexpr double gl6_w[3] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr double gl12_x[6] = {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                              -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
constexpr double gl12_w[6] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                              0.2031674267230659, 0.2334925365383547, 0.2491470458134029};
constexpr double gl20_x[10] = {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                               -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                               -0.5108670019508271, -0.3737060887154195, -0.2277858511416451,
                               -0.07652652113349733};
constexpr double gl20_w[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                               0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                               0.1316886384491766,  0.1420961093183820,  0.1491729864726037,
                               0.1527533871307258};

// Upper-tail orthant probability P(X > dh, Y > dk) for standard bivariate
// normal with correlation r; Drezner-Wesolowsky method with Genz's
// high-correlation reformulation.
double bvnu(double dh, double dk, double r) {
    if (dh == 40.0 || dk == 40.0) return 0.0;
    if (dh == -40.0) return std_normal_cdf(-dk);
    if (dk == -40.0) return std_normal_cdf(-dh);

    const double* gx;
    const double* gw;
    int lg;
    double ar = std::fabs(r);
    if (ar < 0.3) {
        gx = gl6_x;
        gw = gl6_w;
        lg = 3;
    } else if (ar < 0.75) {
        gx = gl12_x;
        gw = gl12_w;
        lg = 6;
    } else {
        gx = gl20_x;
        gw = gl20_w;
        lg = 10;
    }

    double h = dh, k = dk, hk = h * k, bvn = 0.0;
    if (ar < 0.925) {
        if (ar > 0.0) {
            double hs = (h * h + k * k) / 2.0;
            double asr = std::asin(r);
            for (int i = 0; i < lg; ++i)
                for (int is = -1; is <= 1; is += 2) {
                    double sn = std::sin(asr * (is * gx[i] + 1.0) / 2.0);
                    bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
                }
            bvn = bvn * asr / (2.0 * two_pi);
        }
        return bvn + std_normal_cdf(-h) * std_normal_cdf(-k);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (ar < 1.0) {
        double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        double bs = (h - k) * (h - k);
        double c = (4.0 - hk) / 8.0;
        double d = (12.0 - hk) / 16.0;
        double asr = -(bs / as + hk) / 2.0;
        if (asr > -100.0)
            bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (-hk < 100.0) {
            double b = std::sqrt(bs);
            double sp = std::sqrt(two_pi) * std_normal_cdf(-b / a);
            bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (int i = 0; i < lg; ++i)
            for (int is = -1; is <= 1; is += 2) {
                double x = a * (is * gx[i] + 1.0);
                double xs = x * x;
                double rs = std::sqrt(1.0 - xs);
                double asr1 = -(bs / xs + hk) / 2.0;
                if (asr1 > -100.0) {
                    double sp = 1.0 + c * xs * (1.0 + d * xs);
                    double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
                    bvn += a * gw[i] * std::exp(asr1) * (ep - sp);
                }
            }
        bvn = -bvn / two_pi;
    }
    if (r > 0.0) return bvn + std_normal_cdf(-std::max(h, k));
    bvn = -bvn;
    if (k > h) bvn += std_normal_cdf(k) - std_normal_cdf(h);
    return bvn;
}

}  // namespace

double std_normal_cdf(double x) {
    x = saturate(x);
    return 0.5 * std::erfc(-x * 0.7071067811865475244008443621048);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw numeric_error("std_normal_quantile: p must be in (0,1)");
    // Acklam's rational approximation, then one Halley refinement
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    double e = std_normal_cdf(x) - p;
    double u = e * std::sqrt(two_pi) * std::exp(x * x / 2.0);
    x -= u / (1.0 + x * u / 2.0);
    return x;
}

double bivariate_normal_cdf(double h, double k, double rho) {
    if (std::isnan(rho) || std::fabs(rho) > 1.0)
        throw numeric_error("bivariate_normal_cdf: correlation outside [-1,1]");
    h = saturate(h);
    k = saturate(k);
    if (rho == 1.0) return std_normal_cdf(std::min(h, k));
    if (rho == -1.0) return std::max(0.0, std_normal_cdf(h) + std_normal_cdf(k) - 1.0);
    // Phi2(h,k,rho) = P(X > -h, Y > -k) under the same correlation.
    double p = bvnu(-h, -k, rho);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace histcl
