#include <doctest.h>

#include <cmath>
#include <limits>

#include "histcl/error.hpp"
#include "histcl/normal.hpp"
#include "histcl/rng.hpp"
#include "support/quadrature.hpp"

using histcl::bivariate_normal_cdf;
using histcl::std_normal_cdf;

TEST_CASE("std_normal_cdf basics") {
    CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std_normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(std_normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-10));
    CHECK(std_normal_cdf(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(std_normal_cdf(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(std_normal_cdf(50.0) == 1.0);
    // symmetry
    for (double x : {0.3, 1.7, 4.2}) CHECK(std_normal_cdf(x) + std_normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bivariate normal closed forms") {
    // independence
    CHECK(bivariate_normal_cdf(0.0, 0.0, 0.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(bivariate_normal_cdf(1.0, -0.5, 0.0) ==
          doctest::Approx(std_normal_cdf(1.0) * std_normal_cdf(-0.5)).epsilon(1e-12));
    // Phi2(0,0,rho) = 1/4 + asin(rho)/(2 pi)
    for (double rho : {-0.9, -0.5, 0.2, 0.5, 0.8, 0.97}) {
        double expect = 0.25 + std::asin(rho) / (2.0 * M_PI);
        CHECK(bivariate_normal_cdf(0.0, 0.0, rho) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(bivariate_normal_cdf(0.0, 0.0, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // degenerate correlations
    CHECK(bivariate_normal_cdf(0.7, 1.2, 1.0) == doctest::Approx(std_normal_cdf(0.7)).epsilon(1e-14));
    CHECK(bivariate_normal_cdf(0.7, -0.2, -1.0) ==
          doctest::Approx(std::max(0.0, std_normal_cdf(0.7) + std_normal_cdf(-0.2) - 1.0)).epsilon(1e-14));
    CHECK_THROWS_AS((void)bivariate_normal_cdf(0.0, 0.0, 1.5), histcl::numeric_error);
}

TEST_CASE("bivariate normal reference values") {
    // frozen external reference values
    struct Case {
        double h, k, rho, p;
    };
    const Case cases[] = {
        {0.5, -0.3, 0.7, 0.356783634796855},
        {1.2, 1.1, -0.9, 0.74926427332225},
        {-2.0, 0.3, 0.95, 0.0227501319481772},
        {0.0, 0.0, 0.5, 0.333333333333333},
        {3.0, -3.0, -0.999, 7.90169780195715e-05},
        {0.2, 0.4, 0.926, 0.55087965605938},
        {-1.0, -1.0, 0.99999, 0.158223548126443},
        {2.0, 2.0, -0.5, 0.954502980074658},
    };
    for (const auto& c : cases)
        CHECK(bivariate_normal_cdf(c.h, c.k, c.rho) == doctest::Approx(c.p).epsilon(3e-12));
}

TEST_CASE("bivariate normal vs adaptive quadrature oracle") {
    histcl::Rng rng(20240601);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        double h = rng.uniform(-3.0, 3.0);
        double k = rng.uniform(-3.0, 3.0);
        double rho = rng.uniform(-0.99, 0.99);
        double got = bivariate_normal_cdf(h, k, rho);
        double ref = oracle::bivariate_normal_cdf_quadrature(h, k, rho);
        worst = std::max(worst, std::fabs(got - ref));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("bivariate normal symmetry and monotonicity") {
    histcl::Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        double h = rng.uniform(-4.0, 4.0);
        double k = rng.uniform(-4.0, 4.0);
        double rho = rng.uniform(-1.0, 1.0);
        CHECK(bivariate_normal_cdf(h, k, rho) ==
              doctest::Approx(bivariate_normal_cdf(k, h, rho)).epsilon(1e-13));
        // nondecreasing in each argument
        CHECK(bivariate_normal_cdf(h + 0.1, k, rho) >= bivariate_normal_cdf(h, k, rho) - 1e-14);
        CHECK(bivariate_normal_cdf(h, k + 0.1, rho) >= bivariate_normal_cdf(h, k, rho) - 1e-14);
    }
}
