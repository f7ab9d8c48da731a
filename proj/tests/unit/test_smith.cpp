#include <doctest.h>

#include <array>
#include <cmath>

#include "histcl/error.hpp"
#include "histcl/normal.hpp"
#include "histcl/rng.hpp"
#include "histcl/simulate.hpp"
#include "histcl/smith.hpp"

using namespace histcl;

namespace {

const MarginSpec unit_frechet = ConstantMargins{1.0, 1.0, 1.0};  // v(y) = 1/y

SmithParams random_params(Rng& rng) {
    SmithParams p;
    p.s11 = rng.uniform(5.0, 400.0);
    p.s22 = rng.uniform(5.0, 400.0);
    p.s12 = rng.uniform(-0.8, 0.8) * std::sqrt(p.s11 * p.s22);
    p.margins = ConstantMargins{rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0),
                                rng.uniform(-0.3, 0.3)};
    return p;
}

SiteLayout random_layout(Rng& rng, std::size_t K) {
    SiteLayout layout;
    for (std::size_t k = 0; k < K; ++k)
        layout.sites.push_back({"s" + std::to_string(k), rng.uniform(0.0, 40.0), rng.uniform(0.0, 40.0)});
    return layout;
}

}  // namespace

TEST_CASE("pairwise closed form at unit Frechet") {
    SiteLayout layout{{{"a", 0.0, 0.0}, {"b", 3.0, 4.0}}};
    SmithParams p;
    p.s11 = 5.0;
    p.s12 = 1.0;
    p.s22 = 7.0;
    p.margins = unit_frechet;

    double a2 = mahalanobis_sq(p, layout[0], layout[1]);
    double a = std::sqrt(a2);
    for (auto [y1, y2] : {std::pair{1.0, 2.0}, {0.5, 0.7}, {3.0, 0.2}}) {
        double expect = std::exp(-(1.0 / y1) * std_normal_cdf(a / 2.0 + std::log(y2 / y1) / a) -
                                 (1.0 / y2) * std_normal_cdf(a / 2.0 + std::log(y1 / y2) / a));
        double got = smith_cdf(std::array{y1, y2}, std::array<std::size_t, 2>{0, 1}, p, layout);
        CHECK(got == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("diagonal identity against the extremal coefficient") {
    Rng rng(2024);
    for (int i = 0; i < 100; ++i) {
        SmithParams p = random_params(rng);
        SiteLayout layout = random_layout(rng, 2);
        double y = rng.uniform(-0.5, 6.0);
        double theta = extremal_coefficient(0, 1, p, layout);
        GevParams g = margin_at(0, p.margins, layout);
        double expect = std::exp(-theta * gev_v(y, g));
        double got = smith_cdf(std::array{y, y}, std::array<std::size_t, 2>{0, 1}, p, layout);
        CHECK(std::fabs(got - expect) < 1e-10);
    }
}

TEST_CASE("extremal coefficient limits") {
    SiteLayout close{{{"a", 0.0, 0.0}, {"b", 1e-5, 0.0}}};
    SiteLayout far{{{"a", 0.0, 0.0}, {"b", 4000.0, 0.0}}};
    SmithParams p;
    p.margins = unit_frechet;
    CHECK(extremal_coefficient(0, 1, p, close) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(extremal_coefficient(0, 1, p, far) == doctest::Approx(2.0).epsilon(1e-9));

    // a = 2 -> 2 Phi(1)
    SiteLayout two{{{"a", 0.0, 0.0}, {"b", 2.0, 0.0}}};
    CHECK(extremal_coefficient(0, 1, p, two) == doctest::Approx(1.6826894921370859).epsilon(1e-10));

    SiteLayout coincident{{{"a", 1.0, 1.0}, {"b", 1.0, 1.0}}};
    CHECK_THROWS_AS((void)extremal_coefficient(0, 1, p, coincident), numeric_error);
}

TEST_CASE("univariate margins of the pair cdf") {
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        SmithParams p = random_params(rng);
        SiteLayout layout = random_layout(rng, 2);
        GevParams g0 = margin_at(0, p.margins, layout);
        double y = rng.uniform(-1.0, 5.0);
        // push the other coordinate far above its support
        double big = 1e12;
        double got = smith_cdf(std::array{y, big}, std::array<std::size_t, 2>{0, 1}, p, layout);
        CHECK(std::fabs(got - gev_cdf(y, g0)) < 1e-8);
    }
}

TEST_CASE("distant sites factorize") {
    SmithParams p;
    p.s11 = 1.0;
    p.s12 = 0.0;
    p.s22 = 1.0;
    p.margins = ConstantMargins{0.0, 1.0, 0.0};
    SiteLayout layout{{{"a", 0.0, 0.0}, {"b", 20.0, 0.0}}};  // a = 20 > 16
    GevParams g{0.0, 1.0, 0.0};
    for (auto [y1, y2] : {std::pair{0.0, 0.5}, {1.0, -0.3}, {2.0, 2.0}}) {
        double got = smith_cdf(std::array{y1, y2}, std::array<std::size_t, 2>{0, 1}, p, layout);
        double expect = gev_cdf(y1, g) * gev_cdf(y2, g);
        CHECK(std::fabs(got / expect - 1.0) < 1e-6);
    }
}

TEST_CASE("cdf monotone in each coordinate") {
    Rng rng(77);
    for (int i = 0; i < 30; ++i) {
        SmithParams p = random_params(rng);
        SiteLayout layout = random_layout(rng, 3);
        std::array<std::size_t, 3> sites{0, 1, 2};
        std::array<double, 3> y{rng.uniform(-1.0, 4.0), rng.uniform(-1.0, 4.0),
                                rng.uniform(-1.0, 4.0)};
        double base = smith_cdf(y, sites, p, layout);
        for (std::size_t d = 0; d < 3; ++d) {
            auto up = y;
            up[d] += 0.3;
            CHECK(smith_cdf(up, sites, p, layout) >= base - 1e-12);
        }
    }
}

TEST_CASE("triple cdf against Monte Carlo") {
    SmithParams p;
    p.s11 = 30.0;
    p.s12 = 10.0;
    p.s22 = 25.0;
    p.margins = ConstantMargins{0.0, 1.0, 0.0};
    SiteLayout layout{{{"a", 5.0, 5.0}, {"b", 12.0, 9.0}, {"c", 7.0, 16.0}}};

    SimConfig config;
    config.seed = 313;
    config.K = 3;
    config.N = 200000;
    config.params = p;
    Matrix draws = simulate_smith(layout, config);

    std::array<double, 3> y{1.2, 0.8, 1.5};
    double hits = 0;
    for (std::size_t r = 0; r < draws.rows; ++r)
        if (draws(r, 0) <= y[0] && draws(r, 1) <= y[1] && draws(r, 2) <= y[2]) hits += 1.0;
    double phat = hits / static_cast<double>(draws.rows);
    double se = std::sqrt(phat * (1.0 - phat) / static_cast<double>(draws.rows));

    double got = smith_cdf(y, std::array<std::size_t, 3>{0, 1, 2}, p, layout);
    CHECK(std::fabs(got - phat) < 3.0 * se + 1e-4);
}

TEST_CASE("triple cdf edge handling") {
    SmithParams p;
    p.s11 = 4.0;
    p.s12 = 0.0;
    p.s22 = 4.0;
    p.margins = unit_frechet;

    SUBCASE("coincident sites rejected") {
        SiteLayout layout{{{"a", 0.0, 0.0}, {"b", 0.0, 0.0}, {"c", 1.0, 1.0}}};
        CHECK_THROWS_AS((TripleCdf{p, layout, {0, 1, 2}}), numeric_error);
    }
    SUBCASE("collinear sites are jittered, cdf stays sane") {
        SiteLayout layout{{{"a", 0.0, 0.0}, {"b", 1.0, 0.0}, {"c", 2.0, 0.0}}};
        TripleCdf f(p, layout, {0, 1, 2});
        CHECK(f.jittered());
        double v = f(1.0, 1.0, 1.0);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    SUBCASE("lower endpoint sends the cdf to zero") {
        SiteLayout layout{{{"a", 0.0, 0.0}, {"b", 3.0, 1.0}, {"c", 1.0, 4.0}}};
        TripleCdf f(p, layout, {0, 1, 2});
        CHECK(f(-0.5, 1.0, 1.0) == 0.0);  // below the unit Frechet lower endpoint at 0
    }
    SUBCASE("invalid dependence matrix") {
        SmithParams bad = p;
        bad.s12 = 10.0;
        SiteLayout layout{{{"a", 0.0, 0.0}, {"b", 3.0, 1.0}, {"c", 1.0, 4.0}}};
        CHECK_THROWS_AS((void)smith_cdf(std::array{1.0, 1.0, 1.0},
                                        std::array<std::size_t, 3>{0, 1, 2}, bad, layout),
                        numeric_error);
    }
}
