#include <stdexcept>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mfe/config.hpp"
#include "mfe/experiment.hpp"
#include "mfe/io.hpp"
#include "mfe/parallel.hpp"
#include "mfe/report.hpp"
#include "mfe/stats.hpp"

using namespace mfe;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("mfe_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("config: file parsing, overrides, and validation") {
    const fs::path dir = temp_dir("config");
    const fs::path file = dir / "exp.cfg";
    {
        std::ofstream f(file);
        f << "# comment line\n"
          << "model = gaussian\n"
          << "particles = 64\n"
          << "sigma = 2.5\n"
          << "\n"
          << "topk = 2\n"
          << "topk_thresholds = 1,0\n"
          << "regions = 0,1,0,inf;0,0.5,-1,0\n"
          << "compute_weights = false\n";
    }
    const ExperimentConfig cfg = parse_config_file(file.string());
    CHECK(cfg.model == "gaussian");
    CHECK(cfg.particles == 64);
    CHECK(cfg.sigma == 2.5);
    CHECK(cfg.topk == 2);
    CHECK(cfg.topk_thresholds == std::vector<double>{1.0, 0.0});
    REQUIRE(cfg.regions.size() == 2);
    CHECK(cfg.regions[1].value_lo == -1.0);
    CHECK(std::isinf(cfg.regions[0].value_hi));
    CHECK_FALSE(cfg.compute_weights);
    CHECK(cfg.steps == 100);  // untouched default
    CHECK_NOTHROW(validate_config(cfg));

    ExperimentConfig with_override = cfg;
    apply_override(with_override, "seed=999");
    CHECK(with_override.seed == 999);
    CHECK_THROWS_AS(apply_override(with_override, "nonsense_key=1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(with_override, "particles"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(with_override, "particles=abc"), std::invalid_argument);

    CHECK_THROWS_AS(parse_config_file((dir / "missing.cfg").string()), std::runtime_error);
    {
        std::ofstream f(dir / "bad.cfg");
        f << "particles = twelve\n";
    }
    CHECK_THROWS_WITH_AS(parse_config_file((dir / "bad.cfg").string()),
                         doctest::Contains("bad.cfg:1"), std::runtime_error);
}

TEST_CASE("config: validation rejects inconsistent settings") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(validate_config(cfg));

    ExperimentConfig bad = cfg;
    bad.model = "other";
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.topk = 4;  // thresholds still have 3 entries
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.topk_thresholds = {0.0, 0.5, 1.0};
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.particles = 2;  // topk = 3 > particles
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.norming = "weird";
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.regions = {Rect{0.0, 0.6, 0.0, 1.0}, Rect{0.4, 1.0, 0.5, 2.0}};
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.topk_truncation = 2;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
}

TEST_CASE("config: canonical form ignores execution keys, hash tracks semantics") {
    ExperimentConfig a;
    ExperimentConfig b;
    b.workers = 8;
    b.output = "elsewhere";
    b.save_patterns = false;
    b.save_paths = true;
    CHECK(canonical_config(a) == canonical_config(b));
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);

    ExperimentConfig c;
    c.seed = 54321;
    CHECK(config_hash(c) != config_hash(a));
    ExperimentConfig d;
    d.kappa = 1.0000001;
    CHECK(config_hash(d) != config_hash(a));
}

TEST_CASE("config: region list round-trips through its text form") {
    const std::vector<Rect> regions{Rect{0.0, 1.0, 0.0, std::numeric_limits<double>::infinity()},
                                    Rect{0.25, 0.75, -1.5, 2.5}};
    const std::string text = format_regions(regions);
    const std::vector<Rect> back = parse_regions(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].index_lo == 0.0);
    CHECK(std::isinf(back[0].value_hi));
    CHECK(back[1].value_lo == -1.5);
    CHECK_THROWS_AS(parse_regions("0,1,0"), std::invalid_argument);
}

TEST_CASE("resolve_workers: explicit request, environment, default") {
    unsetenv("MFE_WORKERS");
    CHECK(resolve_workers(0) == 1);
    CHECK(resolve_workers(3) == 3);
    setenv("MFE_WORKERS", "5", 1);
    CHECK(resolve_workers(0) == 5);
    CHECK(resolve_workers(2) == 2);  // explicit wins
    setenv("MFE_WORKERS", "abc", 1);
    CHECK_THROWS_AS(resolve_workers(0), std::runtime_error);
    setenv("MFE_WORKERS", "0", 1);
    CHECK_THROWS_AS(resolve_workers(0), std::runtime_error);
    unsetenv("MFE_WORKERS");
}

TEST_CASE("parallel_for: slot writes match the serial result") {
    const std::int64_t count = 1000;
    std::vector<double> serial(count), parallel(count);
    for (std::int64_t i = 0; i < count; ++i)
        serial[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(i * 37 % 101));
    parallel_for(count, 4, [&](std::int64_t i) {
        parallel[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(i * 37 % 101));
    });
    CHECK(parallel == serial);
}

TEST_CASE("parallel_for: rethrows the lowest-index failure") {
    std::atomic<int> ran{0};
    try {
        parallel_for(64, 4, [&](std::int64_t i) {
            ran.fetch_add(1);
            if (i == 3 || i == 7)
                throw std::runtime_error("task " + std::to_string(i) + " failed");
        });
        FAIL("expected parallel_for to rethrow");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "task 3 failed");
    }
    CHECK(ran.load() >= 4);
}

TEST_CASE("endpoint, pattern, and weight CSV files round-trip exactly") {
    const fs::path dir = temp_dir("io");

    const std::vector<std::vector<double>> endpoints{
        {0.1, -2.5e-308, 1e300}, {3.141592653589793, -0.0, 5e-324}, {7.0, 7.0, -7.0}};
    const std::string epath = (dir / "endpoints.csv").string();
    write_endpoints_csv(epath, endpoints);
    CHECK(read_endpoints_csv(epath) == endpoints);

    NormingConstants c;
    c.a = 0.31;
    c.b = 2.7;
    c.n = 3;
    c.source = NormingSource::empirical_quantile;
    std::vector<PointPattern> patterns;
    for (const auto& reps : endpoints) patterns.push_back(build_point_pattern(reps, c));
    const std::string ppath = (dir / "patterns.csv").string();
    write_patterns_csv(ppath, patterns);
    const std::vector<PointPattern> pback = read_patterns_csv(ppath);
    REQUIRE(pback.size() == patterns.size());
    for (std::size_t r = 0; r < patterns.size(); ++r) {
        CHECK(pback[r].n == patterns[r].n);
        for (std::size_t i = 0; i < patterns[r].points.size(); ++i) {
            CHECK(pback[r].points[i].index_fraction == patterns[r].points[i].index_fraction);
            CHECK(pback[r].points[i].value == patterns[r].points[i].value);
        }
    }

    const std::vector<WeightRow> weights{{-0.25, 0.5, 1.5}, {0.125, 0.25, 0.25}};
    const std::string wpath = (dir / "weights.csv").string();
    write_weights_csv(wpath, weights);
    const std::vector<WeightRow> wback = read_weights_csv(wpath);
    REQUIRE(wback.size() == 2);
    CHECK(wback[0].log_weight == -0.25);
    CHECK(wback[1].quad_variation == 0.25);

    const std::string npath = (dir / "norming.json").string();
    write_norming_json(npath, c);
    const NormingConstants nback = read_norming_json(npath);
    CHECK(nback.a == c.a);
    CHECK(nback.b == c.b);
    CHECK(nback.n == c.n);
    CHECK(nback.source == c.source);

    {
        std::ofstream f(dir / "bad.csv");
        f << "wrong,header,here\n0,0,1.0\n";
    }
    CHECK_THROWS_AS(read_endpoints_csv((dir / "bad.csv").string()), std::runtime_error);
    CHECK_THROWS_AS(read_endpoints_csv((dir / "missing.csv").string()), std::runtime_error);
}

TEST_CASE("format_double: shortest round-trip form") {
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456789.123456, -2.5e-308, 0.0}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("report: record semantics, verdict, and JSON round trip") {
    const TestRecord ok = make_record("alpha", 0.5, 0.0, 1.0, true, 100, "note");
    CHECK(ok.pass);
    const TestRecord low = make_record("beta", -0.1, 0.0, 1.0, true, 100);
    CHECK_FALSE(low.pass);
    const TestRecord nan_rec =
        make_record("gamma", std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0, false, 100);
    CHECK_FALSE(nan_rec.pass);

    Report report;
    report.model = "gaussian";
    report.version = "0.1.0";
    report.config_hash = "abcdef0123456789";
    report.seed = 42;
    report.particles = 10;
    report.replications = 100;
    report.norming.a = 0.3;
    report.norming.b = 3.0;
    report.norming.n = 10;
    report.effective_sample_size = 97.5;
    report.records = {ok, low, nan_rec};
    CHECK_FALSE(report.verdict());  // beta is mandatory and fails

    report.records = {ok, nan_rec};
    CHECK(report.verdict());  // gamma fails but is informational

    Report inf_rec = report;
    inf_rec.records.push_back(
        make_record("delta", 2.0, -std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(), true, 5));
    const std::string json = report_to_json(inf_rec);
    const Report back = report_from_json(json);
    CHECK(back.model == "gaussian");
    CHECK(back.seed == 42);
    CHECK(back.norming.b == 3.0);
    REQUIRE(back.effective_sample_size.has_value());
    CHECK(*back.effective_sample_size == 97.5);
    REQUIRE(back.records.size() == 3);
    CHECK(back.records[0].pass);
    CHECK(std::isnan(back.records[1].statistic));
    CHECK(std::isinf(back.records[2].upper));
    CHECK(back.verdict() == inf_rec.verdict());
    CHECK(back.find("delta") != nullptr);
    CHECK(back.find("zeta") == nullptr);

    const std::string table = render_report_table(back);
    CHECK(table.find("alpha") != std::string::npos);
    CHECK(table.find("verdict") != std::string::npos);
}

TEST_CASE("run_experiment: tiny smoke run completes and persists a pattern pair") {
    const fs::path dir = temp_dir("smoke");
    ExperimentConfig cfg;
    cfg.particles = 2;
    cfg.replications = 1;
    cfg.steps = 2;
    cfg.topk = 1;
    cfg.topk_thresholds = {0.0};
    cfg.output = (dir / "out").string();
    validate_config(cfg);
    const Report report = run_experiment(cfg);
    CHECK(report.replications == 1);
    CHECK(fs::exists(dir / "out" / "interacting_endpoints.csv"));
    CHECK(fs::exists(dir / "out" / "iid_endpoints.csv"));
    CHECK(fs::exists(dir / "out" / "interacting_patterns.csv"));
    CHECK(fs::exists(dir / "out" / "iid_patterns.csv"));
    CHECK(fs::exists(dir / "out" / "norming.json"));
    CHECK(fs::exists(dir / "out" / "report.json"));
    const auto patterns = read_patterns_csv((dir / "out" / "iid_patterns.csv").string());
    REQUIRE(patterns.size() == 1);
    CHECK(patterns[0].points.size() == 2);
}

TEST_CASE("run_experiment: identical seeds give byte-identical artifacts for any worker count") {
    const fs::path dir = temp_dir("det");
    ExperimentConfig cfg;
    cfg.particles = 50;
    cfg.replications = 150;
    cfg.steps = 10;
    cfg.seed = 97531;
    cfg.save_paths = true;

    ExperimentConfig one = cfg;
    one.workers = 1;
    one.output = (dir / "w1").string();
    ExperimentConfig many = cfg;
    many.workers = 3;
    many.output = (dir / "w3").string();

    const Report r1 = run_experiment(one);
    const Report r3 = run_experiment(many);
    CHECK(report_to_json(r1) == report_to_json(r3));

    for (const char* name :
         {"interacting_endpoints.csv", "iid_endpoints.csv", "weights.csv",
          "interacting_patterns.csv", "iid_patterns.csv", "norming.json", "report.json",
          "paths_interacting_rep0.bin", "paths_iid_rep0.bin"}) {
        INFO(name);
        REQUIRE(fs::exists(dir / "w1" / name));
        REQUIRE(fs::exists(dir / "w3" / name));
        CHECK(slurp(dir / "w1" / name) == slurp(dir / "w3" / name));
    }

    // analyze on reloaded data reproduces the persisted report
    const RunData reloaded = load_run_data(one);
    const Report again = analyze_data(one, reloaded);
    CHECK(report_to_json(again) == report_to_json(r1));
}

TEST_CASE("simulate_experiment: replication errors carry context") {
    ExperimentConfig cfg;
    cfg.particles = 3;
    cfg.replications = 2;
    cfg.steps = 8;
    cfg.topk = 1;
    cfg.topk_thresholds = {0.0};
    cfg.kappa = 1e154;  // mean reversion this stiff overflows within a few steps
    CHECK_THROWS_WITH_AS(simulate_experiment(cfg), doctest::Contains("replication"),
                         std::runtime_error);
}

TEST_CASE("intermediate_order_check: fixed rank 1 stabilizes near 1 - Gamma(x)") {
    const ModelSpec model = make_gaussian_model({1.0, std::sqrt(2.0), 0.0, 1.0});
    const FrozenLaw law = FrozenLaw::analytic();
    const std::int64_t reps = 300;

    std::vector<std::vector<PointPattern>> per_n;
    for (const std::int64_t n : {64, 128, 256}) {
        const OuMoments m = ou_moments({1.0, std::sqrt(2.0), 0.0, 1.0}, 1.0);
        const NormingConstants norming = gaussian_quantile_norming(n, m.mean, std::sqrt(m.variance));
        std::vector<PointPattern> patterns;
        for (std::int64_t r = 0; r < reps; ++r) {
            SimConfig sim;
            sim.paths = n;
            sim.grid = {1.0, 8};
            sim.seed = 8642;
            sim.replication = r + 10000 * n;
            sim.role = StreamRole::iid_copies;
            const TrajectoryBatch batch = simulate_iid_copies(sim, model, law);
            patterns.push_back(build_point_pattern(batch.endpoints(), norming));
        }
        per_n.push_back(std::move(patterns));
    }

    const IntermediateCheck check =
        intermediate_order_check(per_n, std::vector<std::int64_t>{1, 1, 1}, 0.0);
    REQUIRE(check.event_frequency.size() == 3);
    const double limit = 1.0 - std::exp(-1.0);
    for (double f : check.event_frequency) CHECK(std::abs(f - limit) < 0.12);
    CHECK_FALSE(check.ratio_final_under_half);
    CHECK(check.n_grid == std::vector<std::int64_t>{64, 128, 256});
}

TEST_CASE("intermediate_order_check: input validation") {
    NormingConstants c;
    c.a = 1.0;
    c.n = 4;
    const PointPattern p = build_point_pattern(std::vector<double>{1.0, 2.0, 3.0, 4.0}, c);
    const std::vector<PointPattern> reps{p, p};

    CHECK_THROWS_AS(intermediate_order_check({reps, reps}, {1, 1}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(intermediate_order_check({reps, reps, reps}, {1, 1}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(intermediate_order_check({reps, reps, reps}, {1, 1, 1}, 0.0),
                    std::invalid_argument);  // n grid not increasing
    CHECK_THROWS_AS(intermediate_order_check({reps, reps, reps}, {0, 1, 2}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("build_model and resolve_norming follow the config") {
    ExperimentConfig cfg;
    const ModelSpec gaussian = build_model(cfg);
    CHECK(gaussian.name == "gaussian");
    CHECK(gaussian.closed_form.has_value());

    const FrozenLaw law = resolve_law(cfg, gaussian);
    CHECK(law.is_analytic());
    const NormingConstants auto_norming = resolve_norming(cfg, gaussian, law);
    CHECK(auto_norming.source == NormingSource::analytic_gaussian_quantile);
    CHECK(auto_norming.n == cfg.particles);

    ExperimentConfig asym = cfg;
    asym.norming = "gaussian-asymptotic";
    CHECK(resolve_norming(asym, gaussian, law).source == NormingSource::analytic_gaussian);

    ExperimentConfig rank = cfg;
    rank.model = "rankbased";
    rank.particles = 30;
    rank.topk = 3;
    rank.cloud_paths = 500;
    rank.cloud_picard = 2;
    rank.cloud_tolerance = 1.0;
    rank.steps = 5;
    const ModelSpec rb = build_model(rank);
    CHECK(rb.name == "rankbased");
    CHECK_FALSE(rb.closed_form.has_value());
    const FrozenLaw rb_law = resolve_law(rank, rb);
    CHECK_FALSE(rb_law.is_analytic());
    CHECK(rb_law.cloud().paths.rows() == 500);
    const NormingConstants emp = resolve_norming(rank, rb, rb_law);
    CHECK(emp.source == NormingSource::empirical_quantile);
    CHECK(emp.a > 0.0);
}
