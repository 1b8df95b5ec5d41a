#include <benchmark/benchmark.h>

#include <tsvsim/analysis.hpp>
#include <tsvsim/measurement.hpp>
#include <tsvsim/protocol.hpp>

using namespace tsvsim;

static void BM_WeakMeasure(benchmark::State& state) {
    const auto op = spin_operator(Orientation::from_degrees(60.0));
    const PointerConfig cfg(1.0, 1.0, 10000);
    RandomStream rng(1);
    PureState s = PureState::basis(2, 0);
    for (auto _ : state) {
        auto r = weak_measure(s, op, cfg, rng);
        benchmark::DoNotOptimize(r.reading.value);
        s = r.state;
    }
}
BENCHMARK(BM_WeakMeasure);

static void BM_RunEpr(benchmark::State& state) {
    const auto cfg = make_config(ExperimentKind::EprPair, state.range(0), 0.1, 7);
    RunOptions o;
    o.threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state) {
        auto run = run_epr(cfg, o);
        benchmark::DoNotOptimize(run.ledger.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunEpr)->Args({10000, 1})->Args({10000, 4})->Unit(benchmark::kMillisecond);

static void BM_PredictionAttack(benchmark::State& state) {
    auto cfg = make_config(ExperimentKind::SingleParticle, state.range(0), 0.1, 3);
    const auto run = run_single_particle(cfg);
    std::vector<LedgerRow> rows;
    for (int r = 1; r <= kWeakRows; ++r) rows.push_back(run.ledger.row(LedgerSide::Single, r));
    for (auto _ : state) {
        auto rep = prediction_attack(rows, 1.0);
        benchmark::DoNotOptimize(rep.max_statistic);
    }
}
BENCHMARK(BM_PredictionAttack)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
