#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfe/config.hpp"
#include "mfe/extremes.hpp"
#include "mfe/io.hpp"
#include "mfe/limits.hpp"
#include "mfe/model.hpp"
#include "mfe/report.hpp"
#include "mfe/sde.hpp"

namespace mfe {

ModelSpec build_model(const ExperimentConfig& cfg);
TailParams tail_from_config(const ExperimentConfig& cfg);

// Analytic law when the model carries a closed form, otherwise a Picard-built
// cloud sized per the config.
FrozenLaw resolve_law(const ExperimentConfig& cfg, const ModelSpec& model);

// Norming per config: "auto" picks the quantile-calibrated analytic constants
// when a closed form exists and otherwise fits empirical constants to a
// dedicated calibration batch of ceil(10 n max(1, ln n)) independent copies.
NormingConstants resolve_norming(const ExperimentConfig& cfg, const ModelSpec& model,
                                 const FrozenLaw& law);

// Everything one experiment produces, keyed by replication index.
struct RunData {
    NormingConstants norming;
    std::vector<std::vector<double>> interacting;  // R x N raw endpoints
    std::vector<std::vector<double>> iid;          // R x N raw endpoints
    std::vector<WeightRow> weights;                // R rows when computed, else empty
    // full paths of replication 0, kept only when save_paths is set
    std::optional<TrajectoryBatch> sample_interacting;
    std::optional<TrajectoryBatch> sample_iid;
};

// Monte Carlo production: law resolution, norming, R paired replications over
// the worker pool. Output is identical for any worker count.
RunData simulate_experiment(const ExperimentConfig& cfg);

void write_run_data(const ExperimentConfig& cfg, const RunData& data);
RunData load_run_data(const ExperimentConfig& cfg);

// All statistical comparisons on one run's data; pure given (cfg, data).
Report analyze_data(const ExperimentConfig& cfg, const RunData& data);

// simulate -> persist -> reload from the persisted CSVs -> analyze -> save
// report.json. Reloading makes every run exercise the CSV round trip.
Report run_experiment(const ExperimentConfig& cfg);

// Trend of P(k-th largest normalized value >= x) across growing ensemble
// sizes, with the observable count-ratio statistic mean(count >= x)/rank that
// shares its limit (0 for ranks growing with n).
struct IntermediateCheck {
    std::vector<std::int64_t> n_grid;
    std::vector<std::int64_t> ranks;
    std::vector<double> event_frequency;  // P(exceedance count >= rank)
    std::vector<double> event_se;
    std::vector<double> mean_count;       // E[exceedance count]
    std::vector<double> count_se;
    std::vector<double> ratio;            // mean_count / rank
    std::vector<double> ratio_se;
    bool frequencies_nonincreasing = false;  // within 2 combined SE
    bool ratio_strictly_decreasing = false;
    bool ratio_final_under_half = false;     // last ratio < half the first
};

IntermediateCheck intermediate_order_check(
    const std::vector<std::vector<PointPattern>>& per_n_patterns,
    const std::vector<std::int64_t>& ranks, double x);

} // namespace mfe
