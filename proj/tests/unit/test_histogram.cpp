#include <doctest.h>

#include <algorithm>
#include <map>

#include "histcl/error.hpp"
#include "histcl/histogram.hpp"
#include "histcl/rng.hpp"

using namespace histcl;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (auto& v : m.values) v = rng.uniform(-3.0, 7.0);
    return m;
}

// brute-force recount, independent of aggregate()
std::map<BinIndex, std::int64_t> recount(const Matrix& data, const BinGrid& grid) {
    std::map<BinIndex, std::int64_t> counts;
    for (std::size_t r = 0; r < data.rows; ++r) {
        BinIndex bin(data.cols);
        for (std::size_t k = 0; k < data.cols; ++k) bin[k] = grid.locate(k, data(r, k));
        ++counts[bin];
    }
    return counts;
}

}  // namespace

TEST_CASE("block spans") {
    Matrix data = random_matrix(6, 1, 1);
    auto grid = std::make_shared<const BinGrid>(make_grid(data, 4));
    HistogramSeries s = aggregate(data, grid, 3);
    CHECK(s.block_spans == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {2, 4}, {4, 6}});

    Matrix d7 = random_matrix(7, 1, 2);
    auto g7 = std::make_shared<const BinGrid>(make_grid(d7, 4));
    HistogramSeries s7 = aggregate(d7, g7, 3);
    CHECK(s7.histograms[0].total == 3);
    CHECK(s7.histograms[1].total == 2);
    CHECK(s7.histograms[2].total == 2);
}

TEST_CASE("aggregate matches direct recount and merge is aggregation at T=1") {
    Matrix data = random_matrix(1000, 3, 3);
    auto grid = std::make_shared<const BinGrid>(make_grid(data, 5));

    HistogramSeries t1 = aggregate(data, grid, 1);
    CHECK(t1.histograms[0].total == 1000);
    CHECK(t1.histograms[0].counts == recount(data, *grid));

    for (std::size_t T : {2, 4, 7, 1000}) {
        HistogramSeries ts = aggregate(data, grid, T);
        CHECK(merge(ts).counts == t1.histograms[0].counts);
    }
}

TEST_CASE("aggregate is chunk-count stable") {
    Matrix data = random_matrix(500, 2, 4);
    auto grid = std::make_shared<const BinGrid>(make_grid(data, 6));
    AggregateOptions small;
    small.chunk_rows = 17;
    AggregateOptions big;
    big.chunk_rows = 100000;
    HistogramSeries a = aggregate(data, grid, 3, small);
    HistogramSeries b = aggregate(data, grid, 3, big);
    for (std::size_t t = 0; t < 3; ++t) CHECK(a.histograms[t].counts == b.histograms[t].counts);
}

TEST_CASE("permutation stability at T=1") {
    Matrix data = random_matrix(300, 2, 5);
    auto grid = std::make_shared<const BinGrid>(make_grid(data, 4));
    HistogramSeries before = aggregate(data, grid, 1);

    // deterministic shuffle of rows
    Rng rng(99);
    Matrix shuffled = data;
    for (std::size_t r = shuffled.rows; r > 1; --r) {
        std::size_t s = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(r)));
        for (std::size_t k = 0; k < shuffled.cols; ++k)
            std::swap(shuffled(r - 1, k), shuffled(s, k));
    }
    HistogramSeries after = aggregate(shuffled, grid, 1);
    CHECK(before.histograms[0].counts == after.histograms[0].counts);
}

TEST_CASE("aggregate errors") {
    Matrix data = random_matrix(10, 1, 6);
    auto grid = std::make_shared<const BinGrid>(make_grid(data, 3));
    CHECK_THROWS_AS(aggregate(data, grid, 11), data_error);
    CHECK_THROWS_AS(aggregate(data, grid, 0), data_error);

    // datum outside the grid names row, margin and value
    Matrix bad = data;
    bad(4, 0) = 1e9;
    try {
        aggregate(bad, grid, 2);
        FAIL("expected data_error");
    } catch (const data_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("row 4") != std::string::npos);
        CHECK(msg.find("margin 0") != std::string::npos);
        CHECK(msg.find("1e+09") != std::string::npos);
    }
    AggregateOptions clamp;
    clamp.clamp = true;
    HistogramSeries s = aggregate(bad, grid, 2, clamp);
    CHECK(s.total() == 10);  // clamped into the edge bin instead
}

TEST_CASE("merge additivity") {
    auto grid = std::make_shared<const BinGrid>(BinGrid({{0.0, 1.0, 2.0}}));
    HistogramSeries s;
    s.grid = grid;
    s.histograms.resize(2);
    s.histograms[0].grid = grid;
    s.histograms[0].add({1}, 2);
    s.histograms[1].grid = grid;
    s.histograms[1].add({1}, 3);
    s.block_spans = {{0, 2}, {2, 5}};
    SparseHistogram m = merge(s);
    CHECK(m.counts.at({1}) == 5);
    CHECK(m.total == 5);
}

TEST_CASE("marginalize") {
    auto grid = std::make_shared<const BinGrid>(BinGrid({{0.0, 1.0}, {0.0, 1.0, 2.0}}));
    SparseHistogram h;
    h.grid = grid;
    h.add({1, 1}, 2);
    h.add({1, 2}, 3);

    SUBCASE("row sum example") {
        MarginalHistogram m = marginalize(h, {0});
        REQUIRE(m.counts.size() == 1);
        CHECK(m.counts[0] == 5);
        CHECK(m.total == 5);
    }
    SUBCASE("identity projection is the dense form") {
        MarginalHistogram m = marginalize(h, {0, 1});
        REQUIRE(m.counts.size() == 2);
        CHECK(m.counts[0] == 2);
        CHECK(m.counts[1] == 3);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(marginalize(h, {}), data_error);
        CHECK_THROWS_AS(marginalize(h, {2}), data_error);
        CHECK_THROWS_AS(marginalize(h, std::vector<std::size_t>{1, 0}), data_error);
    }
}

TEST_CASE("marginal totals equal N for random histograms") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Matrix data = random_matrix(200, 4, 100 + seed);
        auto grid = std::make_shared<const BinGrid>(make_grid(data, 3));
        SparseHistogram h = merge(aggregate(data, grid, 1));
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = a + 1; b < 4; ++b) {
                MarginalHistogram m = marginalize(h, {a, b});
                CHECK(m.total == 200);
                std::int64_t s = 0;
                for (auto c : m.counts) s += c;
                CHECK(s == 200);
            }
    }
}

TEST_CASE("projection consistency for nested index sets") {
    Matrix data = random_matrix(400, 4, 11);
    auto grid = std::make_shared<const BinGrid>(make_grid(data, 3));
    SparseHistogram h = merge(aggregate(data, grid, 1));

    MarginalHistogram direct = marginalize(h, {1, 3});
    MarginalHistogram wide = marginalize(h, {1, 2, 3});
    // re-project the dense 3-margin counts onto positions (0, 2) of the wide set
    std::vector<std::int64_t> re(direct.counts.size(), 0);
    for (std::size_t i = 0; i < wide.shape[0]; ++i)
        for (std::size_t j = 0; j < wide.shape[1]; ++j)
            for (std::size_t k = 0; k < wide.shape[2]; ++k)
                re[i * wide.shape[2] + k] +=
                    wide.counts[(i * wide.shape[1] + j) * wide.shape[2] + k];
    CHECK(re == direct.counts);
}

TEST_CASE("block maxima") {
    Matrix col(4, 1);
    col(0, 0) = 1;
    col(1, 0) = 3;
    col(2, 0) = 2;
    col(3, 0) = 5;
    Matrix out = block_maxima(col, 2);
    REQUIRE(out.rows == 2);
    CHECK(out(0, 0) == 3);
    CHECK(out(1, 0) == 5);

    Matrix same = block_maxima(col, 1);
    CHECK(same.values == col.values);

    Matrix year(90, 2);
    for (std::size_t r = 0; r < 90; ++r)
        for (std::size_t k = 0; k < 2; ++k) year(r, k) = static_cast<double>(r + k);
    CHECK(block_maxima(year, 15).rows == 6);

    CHECK_THROWS_AS(block_maxima(col, 5), data_error);
    CHECK_THROWS_AS(block_maxima(col, 0), data_error);
}

TEST_CASE("detrend") {
    CHECK(detrend({0.0, 1.0, 2.0, 3.0}) == std::vector<double>{0.0, 0.0, 0.0, 0.0});
    CHECK(detrend({5.0, 5.0, 5.0, 5.0}) == std::vector<double>{0.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(detrend({1.0}), data_error);

    // residual slope per the OLS oracle
    Rng rng(8);
    std::vector<double> col(257);
    for (auto& v : col) v = rng.uniform(-2.0, 9.0);
    auto res = detrend(col);
    double n = static_cast<double>(res.size());
    double mt = (n - 1.0) / 2.0, my = 0.0;
    for (double v : res) my += v / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        sxx += (i - mt) * (i - mt);
        sxy += (i - mt) * (res[i] - my);
    }
    CHECK(std::fabs(sxy / sxx) < 1e-10);
    CHECK(std::fabs(my) < 1e-10);
}
