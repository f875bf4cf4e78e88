#include "mfe/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mfe {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// JSON has no +-inf/nan literals; encode non-finite bounds as strings.
ordered_json encode_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double decode_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::runtime_error("report: bad numeric encoding '" + s + "'");
}

std::string format_stat(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

TestRecord make_record(std::string name, double statistic, double lower, double upper,
                       bool mandatory, std::int64_t sample_size, std::string note) {
    TestRecord r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.lower = lower;
    r.upper = upper;
    r.pass = lower <= statistic && statistic <= upper;  // false when statistic is nan
    r.mandatory = mandatory;
    r.sample_size = sample_size;
    r.note = std::move(note);
    return r;
}

bool Report::verdict() const {
    for (const TestRecord& r : records)
        if (r.mandatory && !r.pass) return false;
    return true;
}

const TestRecord* Report::find(const std::string& name) const {
    for (const TestRecord& r : records)
        if (r.name == name) return &r;
    return nullptr;
}

std::string report_to_json(const Report& report) {
    ordered_json j;
    j["model"] = report.model;
    j["version"] = report.version;
    j["config_hash"] = report.config_hash;
    j["seed"] = report.seed;
    j["particles"] = report.particles;
    j["replications"] = report.replications;
    j["norming"] = {{"a", report.norming.a},
                    {"b", report.norming.b},
                    {"n", report.norming.n},
                    {"source", to_string(report.norming.source)}};
    if (report.effective_sample_size)
        j["effective_sample_size"] = *report.effective_sample_size;
    j["verdict"] = report.verdict() ? "pass" : "fail";
    j["records"] = ordered_json::array();
    for (const TestRecord& r : report.records) {
        ordered_json rec;
        rec["name"] = r.name;
        rec["statistic"] = encode_number(r.statistic);
        rec["lower"] = encode_number(r.lower);
        rec["upper"] = encode_number(r.upper);
        rec["pass"] = r.pass;
        rec["mandatory"] = r.mandatory;
        rec["sample_size"] = r.sample_size;
        rec["note"] = r.note;
        j["records"].push_back(std::move(rec));
    }
    return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
    const json j = json::parse(text);
    Report report;
    report.model = j.at("model").get<std::string>();
    report.version = j.at("version").get<std::string>();
    report.config_hash = j.at("config_hash").get<std::string>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.particles = j.at("particles").get<std::int64_t>();
    report.replications = j.at("replications").get<std::int64_t>();
    const auto& n = j.at("norming");
    report.norming.a = n.at("a").get<double>();
    report.norming.b = n.at("b").get<double>();
    report.norming.n = n.at("n").get<std::int64_t>();
    report.norming.source = norming_source_from_string(n.at("source").get<std::string>());
    if (j.contains("effective_sample_size"))
        report.effective_sample_size = j.at("effective_sample_size").get<double>();
    for (const auto& rec : j.at("records")) {
        TestRecord r;
        r.name = rec.at("name").get<std::string>();
        r.statistic = decode_number(rec.at("statistic"));
        r.lower = decode_number(rec.at("lower"));
        r.upper = decode_number(rec.at("upper"));
        r.pass = rec.at("pass").get<bool>();
        r.mandatory = rec.at("mandatory").get<bool>();
        r.sample_size = rec.at("sample_size").get<std::int64_t>();
        r.note = rec.at("note").get<std::string>();
        report.records.push_back(std::move(r));
    }
    return report;
}

void save_report(const Report& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    const std::string body = report_to_json(report);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

Report load_report(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return report_from_json(ss.str());
}

std::string render_report_table(const Report& report) {
    std::ostringstream out;
    out << "model: " << report.model << "   particles: " << report.particles
        << "   replications: " << report.replications << "   seed: " << report.seed << "\n";
    out << "norming: " << to_string(report.norming.source) << " (a=" << format_stat(report.norming.a)
        << ", b=" << format_stat(report.norming.b) << ", n=" << report.norming.n << ")\n";
    if (report.effective_sample_size)
        out << "effective sample size: " << format_stat(*report.effective_sample_size) << "\n";
    out << "config: " << report.config_hash << "   version: " << report.version << "\n\n";

    const auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    out << pad("test", 34) << pad("statistic", 13) << pad("lower", 11) << pad("upper", 11)
        << pad("result", 8) << pad("n", 7) << "note\n";
    out << std::string(100, '-') << "\n";
    for (const TestRecord& r : report.records) {
        out << pad(r.name, 34) << pad(format_stat(r.statistic), 13) << pad(format_stat(r.lower), 11)
            << pad(format_stat(r.upper), 11) << pad(r.pass ? "pass" : "FAIL", 8)
            << pad(std::to_string(r.sample_size), 7) << (r.mandatory ? "" : "[info] ") << r.note
            << "\n";
    }
    out << "\nverdict: " << (report.verdict() ? "PASS" : "FAIL") << "\n";
    return out.str();
}

} // namespace mfe
