// Serial reference vs OpenMP kernels. Run with --benchmark_filter=<kernel> to
// compare one pair; arguments are the problem sizes.
#include <benchmark/benchmark.h>

#include <numeric>

#include "ruelle/kernels.hpp"
#include "ruelle/maps.hpp"
#include "ruelle/potential.hpp"

using namespace ruelle;

namespace {

DenseMatrix filled(int n)
{
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Real(1) / (1 + i + 2 * j);
    return m;
}

template <auto Kernel>
void bm_matvec(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto m = filled(n);
    std::vector<Real> x(n, 1), y(n);
    for (auto _ : state) {
        Kernel(m, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}

template <auto Kernel>
void bm_vecmat(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto m = filled(n);
    std::vector<Real> x(n, 1), y(n);
    for (auto _ : state) {
        Kernel(x, m, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}

template <auto Kernel>
void bm_tree(benchmark::State& state)
{
    const auto map = doubling_map();
    const auto pot = Potential::cos_mode(1, 0.1L);
    const Observable one = [](Real) { return Real(1); };
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(map, pot, one, 0.3L, static_cast<int>(state.range(0))));
}

template <auto Kernel>
void bm_periodic(benchmark::State& state)
{
    const auto map = doubling_map();
    const auto pot = Potential::cos_mode(1, 0.1L);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(map, pot, static_cast<int>(state.range(0))));
}

template <auto Kernel>
void bm_hits(benchmark::State& state)
{
    const auto map = doubling_map();
    const auto psi = Potential::cos_mode(1);
    const Grid grid{256, 0};
    std::vector<Real> cdf(grid.n);
    for (int i = 0; i < grid.n; ++i) cdf[i] = Real(i + 1) / grid.n;
    const std::vector<int> n_list{10, 20, 30};
    HitCountRequest req;
    req.map = &map;
    req.psi = &psi;
    req.cdf = cdf;
    req.grid = grid;
    req.n_list = n_list;
    req.a = 0.25L;
    req.b = 0.45L;
    req.n_samples = state.range(0);
    req.batches = 20;
    req.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(req));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(bm_matvec<serial::matvec>)->Name("matvec/serial")->Arg(256)->Arg(1024);
BENCHMARK(bm_matvec<parallel::matvec>)->Name("matvec/parallel")->Arg(256)->Arg(1024)->UseRealTime();
BENCHMARK(bm_vecmat<serial::vecmat>)->Name("vecmat/serial")->Arg(256)->Arg(1024);
BENCHMARK(bm_vecmat<parallel::vecmat>)->Name("vecmat/parallel")->Arg(256)->Arg(1024)->UseRealTime();
BENCHMARK(bm_tree<serial::transfer_tree>)->Name("transfer_tree/serial")->Arg(14)->Arg(18);
BENCHMARK(bm_tree<parallel::transfer_tree>)->Name("transfer_tree/parallel")->Arg(14)->Arg(18)->UseRealTime();
BENCHMARK(bm_periodic<serial::periodic_points>)->Name("periodic_points/serial")->Arg(12);
BENCHMARK(bm_periodic<parallel::periodic_points>)->Name("periodic_points/parallel")->Arg(12)->UseRealTime();
BENCHMARK(bm_hits<serial::hit_counts>)->Name("hit_counts/serial")->Arg(100000);
BENCHMARK(bm_hits<parallel::hit_counts>)->Name("hit_counts/parallel")->Arg(100000)->UseRealTime();

BENCHMARK_MAIN();
