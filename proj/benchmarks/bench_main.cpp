#include <benchmark/benchmark.h>

#include "mfe/config.hpp"
#include "mfe/experiment.hpp"
#include "mfe/girsanov.hpp"
#include "mfe/limits.hpp"
#include "mfe/model.hpp"
#include "mfe/sde.hpp"

namespace {

using namespace mfe;

SimConfig sim_config(std::int64_t paths, std::int64_t steps, std::int64_t replication,
                     StreamRole role, bool record_increments = false) {
    SimConfig cfg;
    cfg.paths = paths;
    cfg.grid = {1.0, steps};
    cfg.seed = 4242;
    cfg.replication = replication;
    cfg.role = role;
    cfg.record_increments = record_increments;
    return cfg;
}

void BM_GaussianInteracting(benchmark::State& state) {
    const ModelSpec model = make_gaussian_model({1.0, std::sqrt(2.0), 0.0, 1.0});
    std::int64_t rep = 0;
    for (auto _ : state) {
        const auto batch =
            simulate_interacting(sim_config(state.range(0), 100, rep++, StreamRole::interacting),
                                 model);
        benchmark::DoNotOptimize(batch.values.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_GaussianInteracting)->Arg(1000);

// Same dynamics routed through the generic pairwise kernel instead of the
// running-mean shortcut; the gap is the cost of the O(N^2) interaction.
void BM_GaussianInteractingGeneric(benchmark::State& state) {
    ModelSpec model = make_gaussian_model({1.0, std::sqrt(2.0), 0.0, 1.0});
    model.structure = MeanFieldStructure::generic;
    std::int64_t rep = 0;
    for (auto _ : state) {
        const auto batch =
            simulate_interacting(sim_config(state.range(0), 100, rep++, StreamRole::interacting),
                                 model);
        benchmark::DoNotOptimize(batch.values.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_GaussianInteractingGeneric)->Arg(1000);

void BM_RankBasedInteracting(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.model = "rankbased";
    const ModelSpec model = build_model(cfg);
    std::int64_t rep = 0;
    for (auto _ : state) {
        const auto batch =
            simulate_interacting(sim_config(state.range(0), 100, rep++, StreamRole::interacting),
                                 model);
        benchmark::DoNotOptimize(batch.values.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_RankBasedInteracting)->Arg(500);

void BM_GirsanovWeight(benchmark::State& state) {
    const ModelSpec model = make_gaussian_model({1.0, std::sqrt(2.0), 0.0, 1.0});
    const FrozenLaw law = FrozenLaw::analytic();
    const auto batch = simulate_iid_copies(
        sim_config(state.range(0), 100, 0, StreamRole::iid_copies, true), model, law);
    for (auto _ : state) {
        const WeightRecord record = girsanov_weight(batch, law, model);
        benchmark::DoNotOptimize(record.log_weight);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_GirsanovWeight)->Arg(1000);

void BM_TopkJointProb(benchmark::State& state) {
    const std::vector<double> thresholds{2.0, 1.5, 1.0, 0.5, 0.0};
    const TailParams tail{0.1};
    for (auto _ : state) {
        const TopkProb p = topk_joint_prob(thresholds, tail);
        benchmark::DoNotOptimize(p.value);
    }
}
BENCHMARK(BM_TopkJointProb);

void BM_SpacingsSampler(benchmark::State& state) {
    const TailParams tail{0.0};
    Rng rng(4242, 0, StreamRole::sampler);
    for (auto _ : state) {
        const auto top = sample_spacings_limit(5, tail, rng);
        benchmark::DoNotOptimize(top.data());
    }
}
BENCHMARK(BM_SpacingsSampler);

}  // namespace

BENCHMARK_MAIN();
