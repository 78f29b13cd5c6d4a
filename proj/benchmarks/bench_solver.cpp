#include <benchmark/benchmark.h>

#include "coag/initial.hpp"
#include "coag/solver.hpp"

namespace {

coag::DistributionState make_state(std::size_t cells) {
    auto grid = coag::Grid::geometric(1e-4, 1e3, cells);
    return coag::project_initial(coag::InitialDensity::exponential(1.0, 1.0), grid);
}

void BM_PairTableBuild(benchmark::State& state) {
    auto grid = coag::Grid::geometric(1e-4, 1e3, static_cast<std::size_t>(state.range(0)));
    coag::Kernel kernel = coag::Kernel::smoluchowski();
    coag::TruncationParams tp{1000.0, 1};
    for (auto _ : state) {
        coag::PairTable table(*grid, kernel, tp);
        benchmark::DoNotOptimize(table.pair_count());
    }
}
BENCHMARK(BM_PairTableBuild)->Arg(100)->Arg(200)->Arg(400);

void BM_Rhs(benchmark::State& state) {
    auto st = make_state(static_cast<std::size_t>(state.range(0)));
    coag::PairTable table(*st.grid, coag::Kernel::smoluchowski(), {1000.0, 1});
    std::vector<double> dgdt(st.values.size());
    double loss = 0.0;
    for (auto _ : state) {
        table.rhs(st.values, dgdt, loss);
        benchmark::DoNotOptimize(dgdt.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(table.pair_count()));
}
BENCHMARK(BM_Rhs)->Arg(100)->Arg(200)->Arg(400)->Arg(800);

void BM_SingleStep(benchmark::State& state) {
    coag::RunConfig cfg;
    cfg.kernel = coag::Kernel::smoluchowski();
    cfg.trunc = {1000.0, 1};
    cfg.grid = {1e-4, 1e3, static_cast<std::size_t>(state.range(0))};
    cfg.initial = coag::InitialDensity::exponential(1.0, 1.0);
    cfg.time.dt = 1e-3;
    cfg.horizon = 1e-3;
    for (auto _ : state) {
        coag::Trajectory traj = coag::run(cfg);
        benchmark::DoNotOptimize(traj.moments.back().m1);
    }
}
BENCHMARK(BM_SingleStep)->Arg(100)->Arg(200)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
