#include <benchmark/benchmark.h>

#include "sosreg/calculus.hpp"
#include "sosreg/catalog.hpp"
#include "sosreg/counterex.hpp"
#include "sosreg/cover.hpp"
#include "sosreg/sos.hpp"

using namespace sosreg;

static void BM_DerivativesMotzkin(benchmark::State& state) {
    const auto f = make_function(catalog_function("motzkin_M"));
    const Point x{0.3, -0.2, 0.4};
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(f->derivatives(x, m));
}
BENCHMARK(BM_DerivativesMotzkin)->DenseRange(1, 4);

static void BM_ControlDistance(benchmark::State& state) {
    const auto f = make_function("x^4+y^4+0.1", {"x", "y"});
    const ControlDistanceParams p{0.25};
    const Point x{0.3, 0.4};
    for (auto _ : state) benchmark::DoNotOptimize(control_distance(*f, x, p));
}
BENCHMARK(BM_ControlDistance);

static void BM_Decompose1D(benchmark::State& state) {
    const auto f = make_function("x^2", {"x"});
    DecomposeParams p;
    p.region = Ball{{0.0}, 1.0};
    p.override_inequalities = true;
    for (auto _ : state) benchmark::DoNotOptimize(decompose(f, p));
}
BENCHMARK(BM_Decompose1D)->Unit(benchmark::kMillisecond);

static void BM_Decompose2D(benchmark::State& state) {
    const auto f = make_function("x^2+y^2", {"x", "y"});
    DecomposeParams p;
    p.region = Ball{{0.0, 0.0}, 0.03};
    p.override_inequalities = true;
    for (auto _ : state) benchmark::DoNotOptimize(decompose(f, p));
}
BENCHMARK(BM_Decompose2D)->Unit(benchmark::kMillisecond);

static void BM_VerifyDecomposition(benchmark::State& state) {
    const auto f = make_function("x^2", {"x"});
    DecomposeParams p;
    p.override_inequalities = true;
    const auto d = decompose(f, p);
    std::vector<Point> grid;
    for (int i = 0; i <= 4000; ++i) grid.push_back({-0.999 + 1.998 * i / 4000.0});
    for (auto _ : state) benchmark::DoNotOptimize(verify_decomposition(*d, grid, 0));
}
BENCHMARK(BM_VerifyDecomposition)->Unit(benchmark::kMillisecond);

static void BM_MonotoneBounds(benchmark::State& state) {
    const FamilyParams fam = default_family(0.6, 0.5);
    const Modulus m = Modulus::power(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(monotone_bounds(fam, m, 0.1));
}
BENCHMARK(BM_MonotoneBounds)->Unit(benchmark::kMillisecond);

static void BM_DeltaNu(benchmark::State& state) {
    DeltaNuOptions opt;
    opt.restarts = 4;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_delta_nu(1, 3.0, opt));
}
BENCHMARK(BM_DeltaNu)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
