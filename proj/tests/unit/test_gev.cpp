#include <doctest.h>

#include <cmath>
#include <limits>

#include "histcl/error.hpp"
#include "histcl/gev.hpp"
#include "histcl/rng.hpp"

using namespace histcl;

TEST_CASE("gev_v spot values") {
    CHECK(gev_v(0.0, 0.0, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK(gev_v(1.0, 0.0, 1.0, 1.0) == doctest::Approx(0.5));  // (1+1)^-1
    for (double xi : {-0.4, 0.0, 0.3, 1.0})
        CHECK(gev_v(2.5, 2.5, 1.7, xi) == doctest::Approx(1.0));  // base = 1 at y = mu
    CHECK_THROWS_AS((void)gev_v(0.0, 0.0, -1.0, 0.0), numeric_error);
}

TEST_CASE("gev support endpoints") {
    // xi > 0: lower endpoint mu - sigma/xi
    double lo = 0.0 - 1.0 / 0.5;
    CHECK(gev_v(lo - 0.1, 0.0, 1.0, 0.5) == std::numeric_limits<double>::infinity());
    CHECK(gev_cdf(lo - 0.1, 0.0, 1.0, 0.5) == 0.0);
    CHECK(gev_log_v(lo - 0.1, 0.0, 1.0, 0.5) == std::numeric_limits<double>::infinity());
    // xi < 0: upper endpoint mu + sigma/|xi|
    double hi = 0.0 + 1.0 / 0.5;
    CHECK(gev_v(hi + 0.1, 0.0, 1.0, -0.5) == 0.0);
    CHECK(gev_cdf(hi + 0.1, 0.0, 1.0, -0.5) == 1.0);
    CHECK(gev_log_v(hi + 0.1, 0.0, 1.0, -0.5) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("gev cdf and quantile") {
    CHECK(gev_cdf(0.0, 0.0, 1.0, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(gev_quantile(std::exp(-1.0), 0.0, 1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)gev_quantile(0.0, 0.0, 1.0, 0.0), numeric_error);
    CHECK_THROWS_AS((void)gev_quantile(1.0, 0.0, 1.0, 0.0), numeric_error);
}

TEST_CASE("gev quantile round trip") {
    Rng rng(42);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        double p = rng.uniform(0.001, 0.999);
        double mu = rng.uniform(-5.0, 5.0);
        double sigma = rng.uniform(0.1, 4.0);
        double xi = rng.uniform(-1.0, 1.0);
        if (i % 7 == 0) xi = 0.0;  // keep the Gumbel branch exercised
        double y = gev_quantile(p, mu, sigma, xi);
        worst = std::max(worst, std::fabs(gev_cdf(y, mu, sigma, xi) - p));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("gumbel branch continuity") {
    // values just inside the Gumbel window match the xi->0 limit
    double a = gev_v(1.3, 0.0, 1.0, 0.0);
    double b = gev_v(1.3, 0.0, 1.0, 1e-13);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    double c = gev_v(1.3, 0.0, 1.0, 1e-9);  // just outside, continuous
    CHECK(a == doctest::Approx(c).epsilon(1e-8));
}

TEST_CASE("margin_at") {
    SiteLayout layout{{{"a", 0.0, 0.0}, {"b", 1.0, 1.0}}};
    SUBCASE("constant") {
        MarginSpec m = ConstantMargins{0.0, 1.0, 0.0};
        GevParams g = margin_at(1, m, layout);
        CHECK(g.mu == 0.0);
        CHECK(g.sigma == 1.0);
        CHECK(g.xi == 0.0);
    }
    SUBCASE("spatially varying linear forms") {
        MarginSpec m = SpatiallyVaryingMargins{1.0, 2.0, 3.0, 1.0, 0.0, 0.0, -0.1};
        CHECK(margin_at(0, m, layout).mu == doctest::Approx(1.0));  // intercept at origin
        CHECK(margin_at(1, m, layout).mu == doctest::Approx(6.0));
        CHECK(margin_at(1, m, layout).xi == doctest::Approx(-0.1));
    }
    SUBCASE("negative scale at a site") {
        MarginSpec m = SpatiallyVaryingMargins{0.0, 0.0, 0.0, 0.5, -1.0, 0.0, 0.0};
        CHECK_NOTHROW((void)margin_at(0, m, layout));
        CHECK_THROWS_AS((void)margin_at(1, m, layout), numeric_error);
        CHECK_FALSE(margins_valid(m, layout));
    }
}
