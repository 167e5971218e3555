#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "emlab/christoffel.hpp"
#include "emlab/fokker_planck.hpp"
#include "emlab/grid.hpp"
#include "emlab/langevin.hpp"
#include "emlab/rng.hpp"
#include "emlab/spacetime_field.hpp"
#include "emlab/spacetime_metric.hpp"

namespace {

void bm_philox(benchmark::State& state) {
    std::uint64_t ctr = 0;
    for (auto _ : state) {
        const auto words = emlab::philox4x32(0x123456789abcdef0ull, 0, ctr++);
        benchmark::DoNotOptimize(words);
    }
    state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(bm_philox);

void bm_normal_draws(benchmark::State& state) {
    emlab::RngStream rng(42, 0);
    for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(bm_normal_draws);

void bm_fp_step(benchmark::State& state) {
    emlab::GridSpec grid;
    grid.dim = 1;
    grid.min[0] = -4.0;
    grid.max[0] = 4.0;
    grid.res[0] = static_cast<int>(state.range(0));
    emlab::PotentialSpec pot;
    pot.evaluate = [](double q, double) { return 0.5 * q * q; };
    const auto F = pot.sample(grid);
    emlab::LearningParams lp{1.0, 0.25, 0.0, 1, 0};
    lp.dt = 0.5 * emlab::fp_stable_dt(grid, F, lp);

    emlab::DensityField p{grid, std::vector<double>(grid.size(), 1.0), 0.0};
    emlab::normalize(p);
    for (auto _ : state) {
        p = emlab::fp_step(p, F, lp);
        benchmark::DoNotOptimize(p.values.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(bm_fp_step)->Arg(512)->Arg(2048);

void bm_langevin_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto ens = emlab::make_ensemble(n, 1);
    emlab::LearningParams lp{1.0, 0.25, 0.005, n, 7};
    auto grad = [](const Eigen::VectorXd& q) { return Eigen::VectorXd(q); };
    for (auto _ : state) {
        emlab::langevin_step(ens, grad, lp);
        benchmark::DoNotOptimize(ens.positions.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_langevin_step)->Arg(1000)->Arg(10000);

void bm_metric_field(benchmark::State& state) {
    const auto ens = emlab::perturbed_ensemble(16, 0.1, 3, 1.5);
    emlab::SpatialGrid grid;
    for (int a = 0; a < 3; ++a) {
        grid.min[a] = -7.0;
        grid.max[a] = 7.0;
        grid.res[a] = static_cast<int>(state.range(0));
    }
    for (auto _ : state) {
        const auto mf = emlab::metric_field(ens, grid);
        benchmark::DoNotOptimize(mf.sqrt_minus_g.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(bm_metric_field)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void bm_christoffel(benchmark::State& state) {
    emlab::Grid4 grid;
    grid.res[0] = 4;
    for (int a = 1; a < 4; ++a) {
        grid.max[a] = 2.0 * 3.14159265358979;
        grid.res[a] = static_cast<int>(state.range(0));
    }
    const auto sm = emlab::weak_field_spacetime(grid, 0.05, 4, 9, true, 1);
    for (auto _ : state) {
        const auto cf = emlab::christoffel(sm);
        benchmark::DoNotOptimize(cf.coeffs.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(bm_christoffel)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
