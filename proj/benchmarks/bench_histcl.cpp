#include <benchmark/benchmark.h>

#include <memory>

#include "histcl/grid.hpp"
#include "histcl/histogram.hpp"
#include "histcl/inference.hpp"
#include "histcl/likelihood.hpp"
#include "histcl/normal.hpp"
#include "histcl/simulate.hpp"

using namespace histcl;

namespace {

SmithParams sigma3() {
    SmithParams p;
    p.s11 = 300.0;
    p.s12 = 150.0;
    p.s22 = 200.0;
    p.margins = ConstantMargins{0.0, 1.0, 0.0};
    return p;
}

Matrix simulated(std::size_t N, std::size_t K, SiteLayout& layout) {
    SimConfig c;
    c.seed = 7;
    c.K = K;
    c.N = N;
    c.params = sigma3();
    layout = sample_sites(c);
    return simulate_smith(layout, c);
}

}  // namespace

static void BM_StdNormalCdf(benchmark::State& state) {
    double x = 0.123;
    for (auto _ : state) {
        benchmark::DoNotOptimize(std_normal_cdf(x));
        x += 1e-9;
    }
}
BENCHMARK(BM_StdNormalCdf);

static void BM_BivariateNormalCdf(benchmark::State& state) {
    double x = 0.123;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bivariate_normal_cdf(x, -0.4, 0.8));
        x += 1e-9;
    }
}
BENCHMARK(BM_BivariateNormalCdf);

static void BM_PairCdf(benchmark::State& state) {
    SiteLayout layout{{{"a", 3.0, 4.0}, {"b", 11.0, 9.0}}};
    PairCdf f(sigma3(), layout, 0, 1);
    double y = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f(y, 1.1));
        y += 1e-9;
    }
}
BENCHMARK(BM_PairCdf);

static void BM_TripleCdf(benchmark::State& state) {
    SiteLayout layout{{{"a", 3.0, 4.0}, {"b", 11.0, 9.0}, {"c", 6.0, 14.0}}};
    TripleCdf f(sigma3(), layout, {0, 1, 2});
    double y = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f(y, 1.1, 0.8));
        y += 1e-9;
    }
}
BENCHMARK(BM_TripleCdf);

static void BM_Aggregate(benchmark::State& state) {
    SiteLayout layout;
    Matrix data = simulated(static_cast<std::size_t>(state.range(0)), 10, layout);
    auto grid = std::make_shared<const BinGrid>(make_grid(data, 25));
    for (auto _ : state) {
        HistogramSeries s = aggregate(data, grid, 1);
        benchmark::DoNotOptimize(s.total());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Aggregate)->Arg(10000)->Arg(100000);

static void BM_SymbolicLoglik(benchmark::State& state) {
    SiteLayout layout;
    Matrix data = simulated(10000, static_cast<std::size_t>(state.range(0)), layout);
    auto grid = std::make_shared<const BinGrid>(make_grid(data, 25));
    HistogramSeries series = aggregate(data, grid, 1);
    CompositeConfig config;
    config.order = 2;
    SymbolicObjective obj(series, layout, config);
    SmithParams p = sigma3();
    for (auto _ : state) benchmark::DoNotOptimize(obj.value(p).value);
}
BENCHMARK(BM_SymbolicLoglik)->Arg(5)->Arg(10)->Arg(20);

static void BM_ClassicLoglik(benchmark::State& state) {
    SiteLayout layout;
    Matrix data = simulated(static_cast<std::size_t>(state.range(0)), 5, layout);
    CompositeConfig config;
    config.order = 2;
    ClassicObjective obj(data, layout, config);
    SmithParams p = sigma3();
    for (auto _ : state) benchmark::DoNotOptimize(obj.value(p).value);
}
BENCHMARK(BM_ClassicLoglik)->Arg(1000)->Arg(10000);

static void BM_SmithSimulate(benchmark::State& state) {
    SimConfig c;
    c.seed = 11;
    c.K = 10;
    c.N = static_cast<std::size_t>(state.range(0));
    c.params = sigma3();
    SiteLayout layout = sample_sites(c);
    for (auto _ : state) {
        Matrix m = simulate_smith(layout, c);
        benchmark::DoNotOptimize(m.values.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SmithSimulate)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
