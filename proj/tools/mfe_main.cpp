// Command-line front end: simulate / analyze / run / limits / report.
//
// Exit codes: 0 success (and, for analyze/run, verdict pass), 2 verdict fail,
// 1 any error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mfe/config.hpp"
#include "mfe/experiment.hpp"
#include "mfe/limits.hpp"
#include "mfe/report.hpp"
#include "mfe/version.hpp"

namespace {

struct ConfigArgs {
    std::string config_path;
    std::vector<std::string> overrides;
};

void add_config_flags(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("-c,--config", args.config_path,
                    "key = value config file (defaults used when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("-s,--set", args.overrides, "override one key, e.g. --set particles=500")
        ->take_all();
}

mfe::ExperimentConfig resolve_config(const ConfigArgs& args) {
    mfe::ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = mfe::parse_config_file(args.config_path);
    for (const auto& assignment : args.overrides) mfe::apply_override(cfg, assignment);
    mfe::validate_config(cfg);
    return cfg;
}

int report_exit(const mfe::Report& report) { return report.verdict() ? 0 : 2; }

void print_limits(double gamma, const std::vector<double>& thresholds, std::int64_t truncation,
                  const std::string& regions_text) {
    mfe::TailParams tail;
    tail.gamma = gamma;

    const auto fmt = [](double v) {
        if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };

    std::cout << "gamma = " << fmt(gamma) << ", support (" << fmt(tail.lower()) << ", "
              << fmt(tail.upper()) << "]\n\n";

    std::cout << "x            Gamma(x)       u(x)\n";
    for (double x : thresholds)
        std::cout << fmt(x) << "   " << fmt(mfe::gev_cdf(x, tail)) << "   "
                  << fmt(mfe::gev_tail_mass(x, tail)) << "\n";

    const auto lambdas = mfe::lambda_weights(thresholds, tail);
    std::cout << "\nlambda weights:";
    for (double l : lambdas) std::cout << " " << fmt(l);
    std::cout << "\n\njoint top-k exceedance probabilities (truncation " << truncation << "):\n";
    for (std::size_t j = 1; j <= thresholds.size(); ++j) {
        const std::span<const double> head(thresholds.data(), j);
        const auto p = mfe::topk_joint_prob(head, tail, truncation);
        std::cout << "  k=" << j << ": " << fmt(p.value) << " (truncation bound "
                  << fmt(p.truncation_error_bound) << ")\n";
    }

    if (!regions_text.empty()) {
        const auto rects = mfe::parse_regions(regions_text);
        const mfe::RegionSet region(rects);
        std::cout << "\nregion intensities:\n";
        for (const auto& r : rects)
            std::cout << "  (" << fmt(r.index_lo) << "," << fmt(r.index_hi) << "]x("
                      << fmt(r.value_lo) << "," << fmt(r.value_hi)
                      << "]: nu = " << fmt(mfe::poisson_intensity(r, tail)) << "\n";
        std::cout << "  total: nu = " << fmt(mfe::poisson_intensity(region, tail)) << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo verification of Poisson limits for extremes of "
                 "mean-field interacting diffusions"};
    app.set_version_flag("--version", std::string(mfe::version));
    app.require_subcommand(1);

    ConfigArgs sim_args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "produce endpoint/pattern/weight CSVs for one experiment");
    add_config_flags(simulate, sim_args);

    ConfigArgs analyze_args;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "run the statistical tests on a stored data directory");
    add_config_flags(analyze, analyze_args);

    ConfigArgs run_args;
    CLI::App* run = app.add_subcommand("run", "simulate, persist, reload, analyze, and report");
    add_config_flags(run, run_args);

    double gamma = 0.0;
    std::string thresholds_text = "1,0.5,0";
    std::string regions_text = "0,1,0,inf";
    std::int64_t truncation = 40;
    CLI::App* limits = app.add_subcommand(
        "limits", "print the limit-law quantities for given gamma and thresholds");
    limits->add_option("--gamma", gamma, "extreme value index");
    limits->add_option("--thresholds", thresholds_text, "nonincreasing comma list");
    limits->add_option("--regions", regions_text, "a,b,c,d[;...] rectangles ('' to skip)");
    limits->add_option("--truncation", truncation, "per-coordinate Poisson truncation")
        ->check(CLI::PositiveNumber);

    std::string report_path = "out/report.json";
    CLI::App* report_cmd = app.add_subcommand("report", "render a JSON report as a text table");
    report_cmd->add_option("-i,--input", report_path, "report.json path")
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const auto cfg = resolve_config(sim_args);
            const auto data = mfe::simulate_experiment(cfg);
            mfe::write_run_data(cfg, data);
            std::cout << "wrote " << data.interacting.size() << " replications to " << cfg.output
                      << "\n";
            return 0;
        }
        if (analyze->parsed()) {
            const auto cfg = resolve_config(analyze_args);
            const auto data = mfe::load_run_data(cfg);
            const auto report = mfe::analyze_data(cfg, data);
            mfe::save_report(report, cfg.output + "/report.json");
            std::cout << mfe::render_report_table(report);
            return report_exit(report);
        }
        if (run->parsed()) {
            const auto cfg = resolve_config(run_args);
            const auto report = mfe::run_experiment(cfg);
            std::cout << mfe::render_report_table(report);
            return report_exit(report);
        }
        if (limits->parsed()) {
            std::vector<double> thresholds;
            std::string item;
            std::stringstream ss(thresholds_text);
            while (std::getline(ss, item, ',')) thresholds.push_back(std::stod(item));
            if (thresholds.empty()) throw std::invalid_argument("empty --thresholds list");
            print_limits(gamma, thresholds, truncation, regions_text);
            return 0;
        }
        if (report_cmd->parsed()) {
            std::cout << mfe::render_report_table(mfe::load_report(report_path));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
