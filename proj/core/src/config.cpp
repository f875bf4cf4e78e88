#include "mfe/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mfe/stats.hpp"

namespace mfe {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    if (value == "inf") return std::numeric_limits<double>::infinity();
    if (value == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
    return v;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
    return static_cast<std::int64_t>(v);
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad unsigned value for '" + key + "': " + value);
    return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: bad boolean value for '" + key + "': " + value);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw std::invalid_argument("config: empty list for '" + key + "'");
    return out;
}

std::string format_double_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += format_value(xs[i]);
    }
    return out;
}

} // namespace

std::vector<Rect> parse_regions(const std::string& text) {
    std::vector<Rect> out;
    std::stringstream ss(text);
    std::string rect_text;
    while (std::getline(ss, rect_text, ';')) {
        const auto parts = parse_double_list("regions", trim(rect_text));
        if (parts.size() != 4)
            throw std::invalid_argument("config: each region needs 4 numbers a,b,c,d");
        out.push_back(Rect{parts[0], parts[1], parts[2], parts[3]});
    }
    if (out.empty()) throw std::invalid_argument("config: empty regions");
    return out;
}

std::string format_regions(const std::vector<Rect>& regions) {
    std::string out;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        if (i) out += ";";
        out += format_value(regions[i].index_lo) + "," + format_value(regions[i].index_hi) + "," +
               format_value(regions[i].value_lo) + "," + format_value(regions[i].value_hi);
    }
    return out;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("config: expected key=value, got: " + assignment);
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config: empty key in: " + assignment);

    if (key == "model") cfg.model = value;
    else if (key == "kappa") cfg.kappa = parse_double(key, value);
    else if (key == "sigma") cfg.sigma = parse_double(key, value);
    else if (key == "m0") cfg.m0 = parse_double(key, value);
    else if (key == "sigma0") cfg.sigma0 = parse_double(key, value);
    else if (key == "rank_slope") cfg.rank_slope = parse_double(key, value);
    else if (key == "rank_offset") cfg.rank_offset = parse_double(key, value);
    else if (key == "particles") cfg.particles = parse_int(key, value);
    else if (key == "steps") cfg.steps = parse_int(key, value);
    else if (key == "T") cfg.horizon = parse_double(key, value);
    else if (key == "seed") cfg.seed = parse_uint(key, value);
    else if (key == "replications") cfg.replications = parse_int(key, value);
    else if (key == "compute_weights") cfg.compute_weights = parse_bool(key, value);
    else if (key == "cloud_paths") cfg.cloud_paths = parse_int(key, value);
    else if (key == "cloud_picard") cfg.cloud_picard = static_cast<int>(parse_int(key, value));
    else if (key == "cloud_tolerance") cfg.cloud_tolerance = parse_double(key, value);
    else if (key == "norming") cfg.norming = value;
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "regions") cfg.regions = parse_regions(value);
    else if (key == "topk") cfg.topk = parse_int(key, value);
    else if (key == "topk_thresholds") cfg.topk_thresholds = parse_double_list(key, value);
    else if (key == "topk_truncation") cfg.topk_truncation = parse_int(key, value);
    else if (key == "ks_coeff") cfg.ks_coeff = parse_double(key, value);
    else if (key == "z_max") cfg.z_max = parse_double(key, value);
    else if (key == "dispersion_lo") cfg.dispersion_lo = parse_double(key, value);
    else if (key == "dispersion_hi") cfg.dispersion_hi = parse_double(key, value);
    else if (key == "gev_ks_max") cfg.gev_ks_max = parse_double(key, value);
    else if (key == "topk_bias_budget") cfg.topk_bias_budget = parse_double(key, value);
    else if (key == "workers") cfg.workers = static_cast<int>(parse_int(key, value));
    else if (key == "output") cfg.output = value;
    else if (key == "save_patterns") cfg.save_patterns = parse_bool(key, value);
    else if (key == "save_paths") cfg.save_paths = parse_bool(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            apply_override(cfg, line);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.model != "gaussian" && cfg.model != "rankbased")
        throw std::invalid_argument("config: model must be 'gaussian' or 'rankbased'");
    if (cfg.norming != "auto" && cfg.norming != "gaussian-quantile" &&
        cfg.norming != "gaussian-asymptotic" && cfg.norming != "empirical")
        throw std::invalid_argument("config: unknown norming '" + cfg.norming + "'");
    if (cfg.particles < 1) throw std::invalid_argument("config: particles must be >= 1");
    if (cfg.steps < 1) throw std::invalid_argument("config: steps must be >= 1");
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("config: T must be positive");
    if (cfg.replications < 1) throw std::invalid_argument("config: replications must be >= 1");
    if (cfg.topk < 1) throw std::invalid_argument("config: topk must be >= 1");
    if (cfg.topk > cfg.particles) throw std::invalid_argument("config: topk must be <= particles");
    if (static_cast<std::int64_t>(cfg.topk_thresholds.size()) != cfg.topk)
        throw std::invalid_argument("config: topk_thresholds must list exactly topk values");
    for (std::size_t j = 1; j < cfg.topk_thresholds.size(); ++j)
        if (cfg.topk_thresholds[j] > cfg.topk_thresholds[j - 1])
            throw std::invalid_argument("config: topk_thresholds must be nonincreasing");
    if (cfg.topk_truncation < cfg.topk)
        throw std::invalid_argument("config: topk_truncation must be >= topk");
    [[maybe_unused]] const RegionSet checked(cfg.regions);  // throws on malformed or overlapping regions
    if (!(cfg.ks_coeff > 0.0)) throw std::invalid_argument("config: ks_coeff must be positive");
    if (!(cfg.z_max > 0.0)) throw std::invalid_argument("config: z_max must be positive");
    if (!(cfg.dispersion_lo <= cfg.dispersion_hi))
        throw std::invalid_argument("config: dispersion bounds out of order");
    if (!(cfg.gev_ks_max > 0.0)) throw std::invalid_argument("config: gev_ks_max must be positive");
    if (cfg.topk_bias_budget < 0.0)
        throw std::invalid_argument("config: topk_bias_budget must be nonnegative");
    if (cfg.cloud_paths < 2) throw std::invalid_argument("config: cloud_paths must be >= 2");
    if (cfg.cloud_picard < 1) throw std::invalid_argument("config: cloud_picard must be >= 1");
    if (cfg.workers < 0) throw std::invalid_argument("config: workers must be >= 0");
}

std::string canonical_config(const ExperimentConfig& cfg) {
    std::string out;
    const auto put = [&out](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    };
    put("model", cfg.model);
    put("kappa", format_value(cfg.kappa));
    put("sigma", format_value(cfg.sigma));
    put("m0", format_value(cfg.m0));
    put("sigma0", format_value(cfg.sigma0));
    put("rank_slope", format_value(cfg.rank_slope));
    put("rank_offset", format_value(cfg.rank_offset));
    put("particles", std::to_string(cfg.particles));
    put("steps", std::to_string(cfg.steps));
    put("T", format_value(cfg.horizon));
    put("seed", std::to_string(cfg.seed));
    put("replications", std::to_string(cfg.replications));
    put("compute_weights", cfg.compute_weights ? "true" : "false");
    put("cloud_paths", std::to_string(cfg.cloud_paths));
    put("cloud_picard", std::to_string(cfg.cloud_picard));
    put("cloud_tolerance", format_value(cfg.cloud_tolerance));
    put("norming", cfg.norming);
    put("gamma", format_value(cfg.gamma));
    put("regions", format_regions(cfg.regions));
    put("topk", std::to_string(cfg.topk));
    put("topk_thresholds", format_double_list(cfg.topk_thresholds));
    put("topk_truncation", std::to_string(cfg.topk_truncation));
    put("ks_coeff", format_value(cfg.ks_coeff));
    put("z_max", format_value(cfg.z_max));
    put("dispersion_lo", format_value(cfg.dispersion_lo));
    put("dispersion_hi", format_value(cfg.dispersion_hi));
    put("gev_ks_max", format_value(cfg.gev_ks_max));
    put("topk_bias_budget", format_value(cfg.topk_bias_budget));
    return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::uint64_t h = stats::fnv1a(canonical_config(cfg));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace mfe
