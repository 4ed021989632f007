#include <benchmark/benchmark.h>

#include "pcs/bounds.hpp"
#include "pcs/sampling.hpp"
#include "pcs/signals.hpp"
#include "pcs/solver.hpp"

using namespace pcs;

namespace {

SensorProfileSet banded(Index c, Index n, Scenario sc) {
    ProfileFamilySpec spec;
    spec.family = ProfileFamily::banded;
    return make_profiles(spec, c, n, sc);
}

} // namespace

static void BM_AssembleDistinct(benchmark::State& state) {
    const Index n = state.range(0);
    const auto p = banded(4, n, Scenario::distinct);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(assemble_distinct(p, RowDistribution{RowLaw::gaussian, n}, n / 2, ++seed));
}
BENCHMARK(BM_AssembleDistinct)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_AssembleIdenticalFourier(benchmark::State& state) {
    const Index n = state.range(0);
    const auto p = banded(4, n, Scenario::identical);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_identical(p, RowDistribution{RowLaw::subsampled_dft, n}, n / 2, ++seed));
}
BENCHMARK(BM_AssembleIdenticalFourier)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_SolveBp(benchmark::State& state) {
    const Index n = 64, m = state.range(0);
    const auto p = banded(2, n, Scenario::distinct);
    const auto op = assemble(p, RowDistribution{RowLaw::subsampled_dft, n}, m, 11);
    const auto sig = draw_sparse(n, m / 6, 12);
    const CVector y = op.apply(sig.x);
    for (auto _ : state) benchmark::DoNotOptimize(solve_bp(op, y));
}
BENCHMARK(BM_SolveBp)->Arg(24)->Arg(40)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_UpsilonIdt(benchmark::State& state) {
    const Index n = 512, c = state.range(0);
    ProfileFamilySpec spec;
    spec.family = ProfileFamily::oscillatory;
    const auto p = make_profiles(spec, c, n, Scenario::identical);
    const auto part = LevelPartition::equal(n, c);
    for (auto _ : state) benchmark::DoNotOptimize(upsilon_idt(p, part));
}
BENCHMARK(BM_UpsilonIdt)->Arg(4)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
