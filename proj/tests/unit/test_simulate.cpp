#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "histcl/error.hpp"
#include "histcl/simulate.hpp"
#include "histcl/smith.hpp"
#include "support/quadrature.hpp"

using namespace histcl;

namespace {

SimConfig base_config() {
    SimConfig c;
    c.seed = 4242;
    c.K = 3;
    c.N = 100;
    c.params.s11 = 300.0;
    c.params.s12 = 150.0;
    c.params.s22 = 200.0;
    c.params.margins = ConstantMargins{0.0, 1.0, 0.0};
    return c;
}

}  // namespace

TEST_CASE("site sampling determinism and nesting") {
    SimConfig c = base_config();
    c.K = 20;
    SiteLayout a = sample_sites(c);
    SiteLayout b = sample_sites(c);
    REQUIRE(a.size() == 20);
    for (std::size_t k = 0; k < 20; ++k) {
        CHECK(a[k].x == b[k].x);
        CHECK(a[k].y == b[k].y);
    }
    SimConfig small = c;
    small.K = 5;
    SiteLayout prefix = sample_sites(small);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(prefix[k].x == a[k].x);
        CHECK(prefix[k].y == a[k].y);
    }
    for (const Site& s : a.sites) {
        CHECK(s.x >= 0.0);
        CHECK(s.x <= 40.0);
        CHECK(s.y >= 0.0);
        CHECK(s.y <= 40.0);
    }
}

TEST_CASE("site coordinates are uniform on the window on average") {
    SimConfig c = base_config();
    c.K = 100000;
    SiteLayout layout = sample_sites(c);
    double mx = 0.0, my = 0.0;
    for (const Site& s : layout.sites) {
        mx += s.x / static_cast<double>(c.K);
        my += s.y / static_cast<double>(c.K);
    }
    double se = 40.0 / std::sqrt(12.0) / std::sqrt(static_cast<double>(c.K));
    CHECK(std::fabs(mx - 20.0) < 3.0 * se);
    CHECK(std::fabs(my - 20.0) < 3.0 * se);
}

TEST_CASE("process simulation is deterministic") {
    SimConfig c = base_config();
    SiteLayout layout = sample_sites(c);
    Matrix a = simulate_smith(layout, c);
    Matrix b = simulate_smith(layout, c);
    CHECK(a.values == b.values);

    SimConfig c2 = c;
    c2.seed = 777;
    Matrix d = simulate_smith(layout, c2);
    CHECK(a.values != d.values);
}

TEST_CASE("marginal law matches the gev") {
    SimConfig c = base_config();
    c.N = 8000;
    c.params.margins = ConstantMargins{1.0, 2.0, 0.1};
    SiteLayout layout = sample_sites(c);
    Matrix draws = simulate_smith(layout, c);
    for (std::size_t k = 0; k < c.K; ++k) {
        std::vector<double> col(draws.rows);
        for (std::size_t r = 0; r < draws.rows; ++r) col[r] = draws(r, k);
        std::sort(col.begin(), col.end());
        GevParams g = margin_at(k, c.params.margins, layout);
        double p = oracle::ks_test_pvalue(col, [&](double y) { return gev_cdf(y, g); });
        CHECK(p > 0.001);
    }
}

TEST_CASE("dependence ordering between parameter scales") {
    // larger Sigma => smaller Mahalanobis distances => stronger dependence
    SiteLayout layout{{{"a", 10.0, 10.0}, {"b", 25.0, 30.0}}};
    auto empirical_theta = [&](double s11, double s12, double s22) {
        SimConfig c = base_config();
        c.K = 2;
        c.N = 20000;
        c.params.s11 = s11;
        c.params.s12 = s12;
        c.params.s22 = s22;
        c.params.margins = ConstantMargins{1.0, 1.0, 1.0};  // unit Frechet
        Matrix d = simulate_smith(layout, c);
        double y = 1.0;
        double hits = 0.0;
        for (std::size_t r = 0; r < d.rows; ++r)
            if (d(r, 0) <= y && d(r, 1) <= y) hits += 1.0;
        return -y * std::log(hits / static_cast<double>(d.rows));
    };
    double weak = empirical_theta(30.0, 15.0, 30.0);     // Sigma_5-style
    double strong = empirical_theta(3000.0, 1500.0, 3000.0);  // Sigma_4-style
    CHECK(weak > strong);
    // and both against the model value
    SmithParams p5 = base_config().params;
    p5.s11 = 30.0;
    p5.s12 = 15.0;
    p5.s22 = 30.0;
    CHECK(std::fabs(weak - extremal_coefficient(0, 1, p5, layout)) < 0.05);
}

TEST_CASE("max-stability on the diagonal functional") {
    SimConfig c = base_config();
    c.N = 6000;
    c.params.margins = ConstantMargins{1.0, 1.0, 1.0};  // unit Frechet
    SiteLayout layout = sample_sites(c);
    Matrix draws = simulate_smith(layout, c);

    // D = max_k Y_k from single draws vs rescaled pairwise maxima
    std::vector<double> single, paired;
    for (std::size_t r = 0; r + 1 < draws.rows; r += 2) {
        double d1 = draws(r, 0), d2 = draws(r + 1, 0);
        for (std::size_t k = 1; k < c.K; ++k) {
            d1 = std::max(d1, draws(r, k));
            d2 = std::max(d2, draws(r + 1, k));
        }
        single.push_back(d1);
        paired.push_back(std::max(d1, d2) / 2.0);
    }
    std::sort(single.begin(), single.end());
    std::sort(paired.begin(), paired.end());
    CHECK(oracle::ks_two_sample_pvalue(single, paired) > 0.001);
}

TEST_CASE("config validation") {
    SimConfig c = base_config();
    c.K = 1;
    CHECK_THROWS_AS((void)sample_sites(c), data_error);
    c = base_config();
    c.window = {1.0, 1.0, 0.0, 40.0};
    CHECK_THROWS_AS((void)sample_sites(c), data_error);
    c = base_config();
    c.params.s12 = 1000.0;
    CHECK_THROWS_AS((void)sample_sites(c), numeric_error);
}
