#include <benchmark/benchmark.h>

#include "irskg/elliptope.hpp"
#include "irskg/experiments.hpp"
#include "irskg/keyrate.hpp"
#include "irskg/lifted.hpp"
#include "irskg/optimizer.hpp"
#include "irskg/probing.hpp"
#include "irskg/quantize.hpp"

namespace {

using namespace irskg;

struct Fixture {
    Scenario sc;
    GeometryVectors geo;
    ChannelGains gains;
    LiftedObjective obj;

    Fixture(int L, int M) {
        ScenarioConfig cfg = config_for_elements(ScenarioConfig{}, L);
        cfg.bs_antennas = M;
        sc = resolve(cfg);
        geo = geometry_vectors(sc);
        Rng rng(7);
        gains = sample_gains(sc, rng);
        obj = make_objective(effective_stats(CVector::Ones(L), geo, gains, sc), geo);
    }
};

void BM_RateClosed(benchmark::State& state) {
    const Fixture fx(20, static_cast<int>(state.range(0)));
    const EffectiveStatistics s = effective_stats(CVector::Ones(20), fx.geo, fx.gains, fx.sc);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rate_closed(s));
    }
}
BENCHMARK(BM_RateClosed)->Arg(4)->Arg(8);

void BM_RateDirect(benchmark::State& state) {
    const Fixture fx(20, static_cast<int>(state.range(0)));
    const EffectiveStatistics s = effective_stats(CVector::Ones(20), fx.geo, fx.gains, fx.sc);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rate_direct(covariance_set(s, fx.geo.R_BS)));
    }
}
BENCHMARK(BM_RateDirect)->Arg(4)->Arg(8);

void BM_ElliptopeProjection(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    Rng rng(3);
    CMatrix A(L, L);
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            A(i, j) = complex_gaussian(rng, 1.0);
        }
    }
    A = 0.5 * (A + A.adjoint());
    for (auto _ : state) {
        benchmark::DoNotOptimize(project_elliptope(A, 1e-10, 5000));
    }
}
BENCHMARK(BM_ElliptopeProjection)->Arg(8)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_OptimizeFactored(benchmark::State& state) {
    const Fixture fx(static_cast<int>(state.range(0)), 4);
    for (auto _ : state) {
        Rng rng(11);
        benchmark::DoNotOptimize(optimize_objective(fx.obj, fx.sc.config.solver, rng));
    }
}
BENCHMARK(BM_OptimizeFactored)->Arg(8)->Arg(20)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_OptimizeProjected(benchmark::State& state) {
    const Fixture fx(static_cast<int>(state.range(0)), 4);
    SolverSettings settings = fx.sc.config.solver;
    settings.method = SubproblemMethod::kProjected;
    for (auto _ : state) {
        Rng rng(11);
        benchmark::DoNotOptimize(optimize_objective(fx.obj, settings, rng));
    }
}
BENCHMARK(BM_OptimizeProjected)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_AgreeKeys(benchmark::State& state) {
    const Fixture fx(20, 4);
    const auto probes = simulate_probes(fx.sc, fx.gains, optimize_no_eve(fx.geo), PilotConfig{}, 128, 5);
    std::vector<CVector> a, b;
    for (const auto& p : probes) {
        a.push_back(p.H_A);
        b.push_back(p.H_B);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(agree_keys(a, b, QuantizerSpec{}));
    }
}
BENCHMARK(BM_AgreeKeys)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
