#include "mfe/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "mfe/girsanov.hpp"
#include "mfe/parallel.hpp"
#include "mfe/stats.hpp"
#include "mfe/version.hpp"

namespace mfe {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).string();
}

TimeGrid grid_of(const ExperimentConfig& cfg) { return TimeGrid{cfg.horizon, cfg.steps}; }

double frequency_se(double f, std::int64_t n) {
    return std::sqrt(f * (1.0 - f) / static_cast<double>(n));
}

// Difference scaled by the combined standard error; 0 when both the gap and
// the noise vanish, +-inf when only the noise does.
double z_score(double diff, double se) {
    if (se > 0.0) return diff / se;
    if (diff == 0.0) return 0.0;
    return diff > 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
}

std::string rect_text(const Rect& r) {
    const auto num = [](double v) {
        if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };
    return "(" + num(r.index_lo) + "," + num(r.index_hi) + "]x(" + num(r.value_lo) + "," +
           num(r.value_hi) + "]";
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

ModelSpec build_model(const ExperimentConfig& cfg) {
    if (cfg.model == "gaussian")
        return make_gaussian_model({cfg.kappa, cfg.sigma, cfg.m0, cfg.sigma0});
    if (cfg.model == "rankbased") {
        RankBasedParams p;
        const double slope = cfg.rank_slope;
        const double offset = cfg.rank_offset;
        p.drift_profile = [slope, offset](double u) { return slope * u + offset; };
        p.profile_derivative_bound = std::abs(slope);
        return make_rankbased_model(p);
    }
    throw std::invalid_argument("build_model: unknown model '" + cfg.model + "'");
}

TailParams tail_from_config(const ExperimentConfig& cfg) {
    TailParams t;
    t.gamma = cfg.gamma;
    return t;
}

FrozenLaw resolve_law(const ExperimentConfig& cfg, const ModelSpec& model) {
    if (model.closed_form) return FrozenLaw::analytic();
    CloudConfig cc;
    cc.paths = cfg.cloud_paths;
    cc.grid = grid_of(cfg);
    cc.seed = cfg.seed;
    cc.picard_iters = cfg.cloud_picard;
    cc.mean_tolerance = cfg.cloud_tolerance;
    return FrozenLaw::from_cloud(model, build_law_cloud(cc, model));
}

NormingConstants resolve_norming(const ExperimentConfig& cfg, const ModelSpec& model,
                                 const FrozenLaw& law) {
    const std::string mode =
        cfg.norming != "auto" ? cfg.norming
                              : (model.closed_form ? std::string("gaussian-quantile")
                                                   : std::string("empirical"));
    if (mode == "gaussian-quantile" || mode == "gaussian-asymptotic") {
        if (!model.closed_form)
            throw std::invalid_argument("norming '" + mode + "' needs a closed-form model");
        const double m = model.closed_form->mean(cfg.horizon);
        const double s = std::sqrt(model.closed_form->variance(cfg.horizon));
        return mode == "gaussian-quantile" ? gaussian_quantile_norming(cfg.particles, m, s)
                                           : gaussian_norming(cfg.particles, m, s);
    }
    if (mode == "empirical") {
        const double dn = static_cast<double>(cfg.particles);
        const auto cal_size = static_cast<std::int64_t>(
            std::ceil(10.0 * dn * std::max(1.0, std::log(dn))));
        SimConfig cal;
        cal.paths = cal_size;
        cal.grid = grid_of(cfg);
        cal.seed = cfg.seed;
        cal.replication = 0;
        cal.role = StreamRole::calibration;
        const TrajectoryBatch batch = simulate_iid_copies(cal, model, law);
        return empirical_norming(batch.endpoints(), cfg.particles);
    }
    throw std::invalid_argument("resolve_norming: unknown norming '" + mode + "'");
}

RunData simulate_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const ModelSpec model = build_model(cfg);
    const FrozenLaw law = resolve_law(cfg, model);

    RunData data;
    data.norming = resolve_norming(cfg, model, law);

    const std::int64_t reps = cfg.replications;
    data.interacting.resize(static_cast<std::size_t>(reps));
    data.iid.resize(static_cast<std::size_t>(reps));
    if (cfg.compute_weights) data.weights.resize(static_cast<std::size_t>(reps));

    const TimeGrid grid = grid_of(cfg);
    parallel_for(reps, resolve_workers(cfg.workers), [&](std::int64_t r) {
        try {
            SimConfig sim;
            sim.paths = cfg.particles;
            sim.grid = grid;
            sim.seed = cfg.seed;
            sim.replication = r;

            sim.role = StreamRole::interacting;
            TrajectoryBatch interacting = simulate_interacting(sim, model);
            data.interacting[static_cast<std::size_t>(r)] = interacting.endpoints();

            sim.role = StreamRole::iid_copies;
            sim.record_increments = cfg.compute_weights;
            TrajectoryBatch copies = simulate_iid_copies(sim, model, law);
            data.iid[static_cast<std::size_t>(r)] = copies.endpoints();

            if (cfg.compute_weights) {
                const WeightRecord w = girsanov_weight(copies, law, model);
                data.weights[static_cast<std::size_t>(r)] =
                    WeightRow{w.log_weight, w.martingale, w.quad_variation};
            }
            if (cfg.save_paths && r == 0) {
                data.sample_interacting = std::move(interacting);
                data.sample_iid = std::move(copies);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("replication " + std::to_string(r) + ": " + e.what());
        }
    });
    return data;
}

void write_run_data(const ExperimentConfig& cfg, const RunData& data) {
    fs::create_directories(cfg.output);
    write_norming_json(join(cfg.output, "norming.json"), data.norming);
    write_endpoints_csv(join(cfg.output, "interacting_endpoints.csv"), data.interacting);
    write_endpoints_csv(join(cfg.output, "iid_endpoints.csv"), data.iid);
    if (!data.weights.empty()) write_weights_csv(join(cfg.output, "weights.csv"), data.weights);
    if (cfg.save_patterns) {
        const auto patterns = [&](const std::vector<std::vector<double>>& endpoints) {
            std::vector<PointPattern> out;
            out.reserve(endpoints.size());
            for (const auto& e : endpoints) out.push_back(build_point_pattern(e, data.norming));
            return out;
        };
        write_patterns_csv(join(cfg.output, "interacting_patterns.csv"),
                           patterns(data.interacting));
        write_patterns_csv(join(cfg.output, "iid_patterns.csv"), patterns(data.iid));
    }
    if (data.sample_interacting)
        write_paths_binary(*data.sample_interacting, join(cfg.output, "paths_interacting_rep0.bin"));
    if (data.sample_iid)
        write_paths_binary(*data.sample_iid, join(cfg.output, "paths_iid_rep0.bin"));
}

RunData load_run_data(const ExperimentConfig& cfg) {
    RunData data;
    data.norming = read_norming_json(join(cfg.output, "norming.json"));
    data.interacting = read_endpoints_csv(join(cfg.output, "interacting_endpoints.csv"));
    data.iid = read_endpoints_csv(join(cfg.output, "iid_endpoints.csv"));
    const std::string weights_path = join(cfg.output, "weights.csv");
    if (fs::exists(weights_path)) data.weights = read_weights_csv(weights_path);
    return data;
}

Report analyze_data(const ExperimentConfig& cfg, const RunData& data) {
    validate_config(cfg);
    const auto reps = static_cast<std::int64_t>(data.interacting.size());
    if (reps < 1) throw std::invalid_argument("analyze_data: no replications");
    if (data.iid.size() != data.interacting.size())
        throw std::invalid_argument("analyze_data: interacting/iid replication counts differ");
    if (!data.weights.empty() && data.weights.size() != data.interacting.size())
        throw std::invalid_argument("analyze_data: weight rows do not match replication count");
    if (data.norming.n != cfg.particles)
        throw std::invalid_argument("analyze_data: norming targets a different particle count");

    const TailParams tail = tail_from_config(cfg);
    const auto k = static_cast<std::size_t>(cfg.topk);
    const auto n_rects = cfg.regions.size();

    // Per-replication reductions for both systems.
    struct SystemStats {
        std::vector<double> max_norm;                       // normalized maxima
        std::vector<std::vector<std::int64_t>> counts;      // per rect: R counts
        std::vector<std::vector<char>> joint;               // per depth: R indicators
    };
    const auto reduce = [&](const std::vector<std::vector<double>>& endpoints) {
        SystemStats s;
        s.max_norm.resize(static_cast<std::size_t>(reps));
        s.counts.assign(n_rects, std::vector<std::int64_t>(static_cast<std::size_t>(reps)));
        s.joint.assign(k, std::vector<char>(static_cast<std::size_t>(reps)));
        for (std::size_t r = 0; r < endpoints.size(); ++r) {
            if (static_cast<std::int64_t>(endpoints[r].size()) != cfg.particles)
                throw std::invalid_argument("analyze_data: replication " + std::to_string(r) +
                                            " has wrong particle count");
            const PointPattern pattern = build_point_pattern(endpoints[r], data.norming);
            std::vector<double> values(pattern.points.size());
            for (std::size_t i = 0; i < values.size(); ++i) values[i] = pattern.points[i].value;
            const std::vector<double> top = order_statistics(values, cfg.topk);
            s.max_norm[r] = top[0];
            for (std::size_t j = 0; j < n_rects; ++j)
                s.counts[j][r] = count_in_rect(pattern, cfg.regions[j]);
            for (std::size_t j = 0; j < k; ++j) {
                bool all = true;
                for (std::size_t l = 0; l <= j && all; ++l)
                    all = top[l] >= cfg.topk_thresholds[l];
                s.joint[j][r] = all ? 1 : 0;
            }
        }
        return s;
    };
    const SystemStats interacting = reduce(data.interacting);
    const SystemStats iid = reduce(data.iid);

    Report report;
    report.model = cfg.model;
    report.version = version;
    report.config_hash = config_hash(cfg);
    report.seed = cfg.seed;
    report.particles = cfg.particles;
    report.replications = reps;
    report.norming = data.norming;

    // Maxima: the two systems against each other, then each against the limit law.
    const double ks_threshold = cfg.ks_coeff * std::sqrt(2.0 / static_cast<double>(reps));
    report.records.push_back(make_record(
        "max_ks_interacting_vs_iid",
        stats::ks_two_sample(interacting.max_norm, iid.max_norm), 0.0, ks_threshold, true, reps,
        "two-sample KS of normalized maxima"));

    const auto gev = [&tail](double x) { return gev_cdf(x, tail); };
    const bool analytic_norming = data.norming.source != NormingSource::empirical_quantile;
    report.records.push_back(make_record(
        "max_gev_ks_iid", stats::ks_one_sample(iid.max_norm, gev), 0.0, cfg.gev_ks_max,
        analytic_norming, reps,
        "one-sample KS vs limit law, gamma=" + fmt(cfg.gamma) +
            (analytic_norming ? "" : " (informational under empirical norming)")));
    report.records.push_back(make_record(
        "max_gev_ks_interacting", stats::ks_one_sample(interacting.max_norm, gev), 0.0,
        cfg.gev_ks_max, false, reps, "one-sample KS vs limit law"));

    // Region counts against the limit intensity (needs enough replications
    // for the count test's preconditions).
    for (std::size_t j = 0; reps >= 100 && j < n_rects; ++j) {
        const double nu = poisson_intensity(cfg.regions[j], tail);
        const auto region_records = [&](const SystemStats& sys, const std::string& suffix,
                                        bool mandatory) {
            const stats::CountTest t = stats::count_distribution_test(sys.counts[j], nu);
            const std::string tag = "region_" + std::to_string(j);
            report.records.push_back(make_record(
                tag + "_mean_z" + suffix, t.mean_z, -cfg.z_max, cfg.z_max, mandatory, reps,
                rect_text(cfg.regions[j]) + " target nu=" + fmt(nu)));
            const double dispersion =
                t.dispersion ? *t.dispersion : std::numeric_limits<double>::quiet_NaN();
            report.records.push_back(make_record(
                tag + "_dispersion" + suffix, dispersion, cfg.dispersion_lo, cfg.dispersion_hi,
                mandatory, reps,
                t.dispersion ? "variance/mean of region counts"
                             : "undefined: all counts zero"));
        };
        region_records(interacting, "", true);
        region_records(iid, "_iid", false);
    }

    // Joint top-j exceedances: systems against each other and the i.i.d.
    // frequency against the limit value.
    for (std::size_t j = 0; j < k; ++j) {
        const auto depth = std::to_string(j + 1);
        double f_int = 0.0, f_iid = 0.0;
        for (std::int64_t r = 0; r < reps; ++r) {
            f_int += interacting.joint[j][static_cast<std::size_t>(r)];
            f_iid += iid.joint[j][static_cast<std::size_t>(r)];
        }
        f_int /= static_cast<double>(reps);
        f_iid /= static_cast<double>(reps);
        const double se_int = frequency_se(f_int, reps);
        const double se_iid = frequency_se(f_iid, reps);

        const double z = z_score(f_int - f_iid, std::hypot(se_int, se_iid));
        report.records.push_back(make_record(
            "top" + depth + "_systems_z", z, -cfg.z_max, cfg.z_max, true, reps,
            "f_interacting=" + fmt(f_int) + " f_iid=" + fmt(f_iid)));

        const std::span<const double> thresholds(cfg.topk_thresholds.data(), j + 1);
        const TopkProb theory = topk_joint_prob(thresholds, tail, cfg.topk_truncation);
        const double budget = cfg.z_max * se_iid + cfg.topk_bias_budget;
        report.records.push_back(make_record(
            "top" + depth + "_iid_vs_theory", f_iid - theory.value, -budget, budget, true, reps,
            "theory=" + fmt(theory.value) +
                " truncation_bound=" + fmt(theory.truncation_error_bound)));
    }

    // Change-of-measure checks: martingale mean and reweighted tail probabilities.
    // Standard errors need at least two replications.
    if (!data.weights.empty() && reps >= 2) {
        std::vector<double> w(data.weights.size());
        for (std::size_t r = 0; r < w.size(); ++r) w[r] = std::exp(data.weights[r].log_weight);
        const double w_mean = stats::mean(w);
        const double w_se = std::sqrt(stats::variance(w) / static_cast<double>(reps));
        report.records.push_back(make_record(
            "weight_mean_z", z_score(w_mean - 1.0, w_se), -cfg.z_max, cfg.z_max, true, reps,
            "mean weight=" + fmt(w_mean) + " se=" + fmt(w_se)));

        const double ess = effective_sample_size(w);
        report.effective_sample_size = ess;
        report.records.push_back(make_record(
            "weight_ess_fraction", ess / static_cast<double>(reps), 0.0, 1.0, false, reps,
            "effective sample size " + fmt(ess) + " of " + std::to_string(reps)));

        for (const double p : {0.5, 0.9, 0.99}) {
            const double x = stats::quantile_ordstat(iid.max_norm, p);
            std::vector<double> indicator(static_cast<std::size_t>(reps));
            double direct = 0.0;
            for (std::int64_t r = 0; r < reps; ++r) {
                indicator[static_cast<std::size_t>(r)] =
                    iid.max_norm[static_cast<std::size_t>(r)] <= x ? 1.0 : 0.0;
                direct += interacting.max_norm[static_cast<std::size_t>(r)] <= x ? 1.0 : 0.0;
            }
            direct /= static_cast<double>(reps);
            const WeightedEstimate reweighted = reweighted_expectation(indicator, w);
            const double se = std::hypot(frequency_se(direct, reps), reweighted.std_error);
            const int pct = static_cast<int>(std::lround(p * 100));
            report.records.push_back(make_record(
                "reweight_p" + std::to_string(pct), z_score(reweighted.estimate - direct, se),
                -cfg.z_max, cfg.z_max, true, reps,
                "x=" + fmt(x) + " direct=" + fmt(direct) + " reweighted=" +
                    fmt(reweighted.estimate)));
        }
    }

    return report;
}

Report run_experiment(const ExperimentConfig& cfg) {
    const RunData produced = simulate_experiment(cfg);
    write_run_data(cfg, produced);
    const RunData reloaded = load_run_data(cfg);
    const Report report = analyze_data(cfg, reloaded);
    save_report(report, join(cfg.output, "report.json"));
    return report;
}

IntermediateCheck intermediate_order_check(
    const std::vector<std::vector<PointPattern>>& per_n_patterns,
    const std::vector<std::int64_t>& ranks, double x) {
    if (per_n_patterns.size() < 3)
        throw std::invalid_argument("intermediate_order_check: need at least 3 grid points");
    if (ranks.size() != per_n_patterns.size())
        throw std::invalid_argument("intermediate_order_check: one rank per grid point");

    IntermediateCheck out;
    for (std::size_t g = 0; g < per_n_patterns.size(); ++g) {
        const auto& patterns = per_n_patterns[g];
        if (patterns.empty())
            throw std::invalid_argument("intermediate_order_check: empty pattern set");
        if (ranks[g] < 1) throw std::invalid_argument("intermediate_order_check: ranks must be >= 1");
        const std::int64_t n = patterns.front().n;
        if (g > 0 && n <= out.n_grid.back())
            throw std::invalid_argument("intermediate_order_check: ensemble sizes must increase");
        out.n_grid.push_back(n);
        out.ranks.push_back(ranks[g]);

        const auto reps = static_cast<std::int64_t>(patterns.size());
        std::vector<double> counts(patterns.size());
        double events = 0.0;
        for (std::size_t r = 0; r < patterns.size(); ++r) {
            const std::int64_t c = exceedance_count(patterns[r], x);
            counts[r] = static_cast<double>(c);
            if (c >= ranks[g]) events += 1.0;
        }
        const double f = events / static_cast<double>(reps);
        const double mean_count = stats::mean(counts);
        const double count_se =
            reps >= 2 ? std::sqrt(stats::variance(counts) / static_cast<double>(reps)) : 0.0;
        out.event_frequency.push_back(f);
        out.event_se.push_back(frequency_se(f, reps));
        out.mean_count.push_back(mean_count);
        out.count_se.push_back(count_se);
        out.ratio.push_back(mean_count / static_cast<double>(ranks[g]));
        out.ratio_se.push_back(count_se / static_cast<double>(ranks[g]));
    }

    out.frequencies_nonincreasing = true;
    out.ratio_strictly_decreasing = true;
    for (std::size_t g = 1; g < out.n_grid.size(); ++g) {
        const double noise = 2.0 * std::hypot(out.event_se[g - 1], out.event_se[g]);
        if (out.event_frequency[g] > out.event_frequency[g - 1] + noise)
            out.frequencies_nonincreasing = false;
        if (!(out.ratio[g] < out.ratio[g - 1])) out.ratio_strictly_decreasing = false;
    }
    out.ratio_final_under_half = out.ratio.back() < 0.5 * out.ratio.front();
    return out;
}

} // namespace mfe
