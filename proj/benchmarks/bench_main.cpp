#include <benchmark/benchmark.h>

#include "ltcoin/coin_sim.hpp"
#include "ltcoin/keyrate.hpp"
#include "ltcoin/lt_decomposition.hpp"

using namespace ltcoin;

static void BM_DeltaSdp(benchmark::State& state) {
    const Protocol proto = state.range(0) == 0 ? Protocol::ThreeState : Protocol::BB84;
    const FlawModel model(0.063, proto);
    const LtCoefficients c = lt_coeffs(model);
    const GramProblem p =
        build_gram_problem(model, SideChannelBudget(1e-6), coin_functional(model, c, primed_basis(model)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_delta_sdp(p).delta);
}
BENCHMARK(BM_DeltaSdp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Scan(benchmark::State& state) {
    std::vector<double> grid;
    for (int l = 0; l <= 200; l += 5) grid.push_back(l);
    const FlawModel model(0.063, Protocol::BB84);
    for (auto _ : state) {
        const auto res = scan(Protocol::BB84, model, SideChannelBudget(1e-6), RateInputs{}, grid, DeltaMethod::Sdp);
        benchmark::DoNotOptimize(res.rows.back().r_per_pulse);
    }
}
BENCHMARK(BM_Scan)->Unit(benchmark::kMillisecond);

static void BM_EphUpper(benchmark::State& state) {
    const FlawModel model(0.063, Protocol::BB84);
    EphInputs in;
    in.model = model;
    in.coeffs = lt_coeffs(model);
    in.plan = tag_plan(model, in.coeffs, 0.9, 0.1, 0.9, 0.1, 0.5);
    in.delta_bound.delta = 2e-6;
    ChannelParams ch;
    ch.distance_km = 50;
    in.yields = channel_yields(Protocol::BB84, model, ch);
    for (auto _ : state) benchmark::DoNotOptimize(eph_upper(in));
}
BENCHMARK(BM_EphUpper);

static void BM_Simulate(benchmark::State& state) {
    const FlawModel model(0.063, Protocol::ThreeState);
    const LtCoefficients c = lt_coeffs(model);
    const TagPlan plan = tag_plan(model, c, 0.9, 0.1, 0.9, 0.1, 0.5);
    ChannelParams ch;
    ch.distance_km = 20;
    const YieldTable yt = channel_yields(Protocol::ThreeState, model, ch);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_tally(state.range(0), plan, yt, 42).coin_rounds);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
