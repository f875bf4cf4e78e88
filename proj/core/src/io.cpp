#include "mfe/io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "json.hpp"

namespace mfe {

namespace {

void write_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct CsvReader {
    std::string text;
    std::size_t pos = 0;
    std::size_t lineno = 0;
    std::string path;

    bool next_line(std::string_view& line) {
        if (pos >= text.size()) return false;
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        line = std::string_view(text).substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        ++lineno;
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
    }
};

// Splits a data line into exactly three comma-separated fields.
std::array<std::string_view, 3> split3(CsvReader& r, std::string_view line) {
    const auto c1 = line.find(',');
    if (c1 == std::string_view::npos) r.fail("expected 3 columns");
    const auto c2 = line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
        r.fail("expected 3 columns");
    return {line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1), line.substr(c2 + 1)};
}

std::array<std::string_view, 4> split4(CsvReader& r, std::string_view line) {
    std::array<std::string_view, 4> out;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const auto c = line.find(',', start);
        if (c == std::string_view::npos) r.fail("expected 4 columns");
        out[static_cast<std::size_t>(i)] = line.substr(start, c - start);
        start = c + 1;
    }
    if (line.find(',', start) != std::string_view::npos) r.fail("expected 4 columns");
    out[3] = line.substr(start);
    return out;
}

double parse_field_double(CsvReader& r, std::string_view field) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        r.fail("bad numeric field '" + std::string(field) + "'");
    return v;
}

std::int64_t parse_field_int(CsvReader& r, std::string_view field) {
    std::int64_t v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        r.fail("bad integer field '" + std::string(field) + "'");
    return v;
}

// Common reading shape for per-replication CSVs: validates the header, then
// hands each data row's fields to `row` along with the replication id.
template <std::size_t Cols, typename RowFn>
void read_grouped_csv(const std::string& path, const std::string& header, RowFn row) {
    CsvReader r{read_text(path), 0, 0, path};
    std::string_view line;
    if (!r.next_line(line)) r.fail("empty file");
    if (line != header) r.fail("unexpected header (want '" + header + "')");
    while (r.next_line(line)) {
        if (line.empty()) continue;
        if constexpr (Cols == 3) {
            const auto f = split3(r, line);
            row(r, parse_field_int(r, f[0]), f);
        } else {
            const auto f = split4(r, line);
            row(r, parse_field_int(r, f[0]), f);
        }
    }
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

void write_endpoints_csv(const std::string& path,
                         const std::vector<std::vector<double>>& per_replication) {
    std::string body = "replication_id,particle_index,x_t\n";
    for (std::size_t r = 0; r < per_replication.size(); ++r) {
        const std::string prefix = std::to_string(r) + ",";
        for (std::size_t i = 0; i < per_replication[r].size(); ++i) {
            body += prefix;
            body += std::to_string(i);
            body += ",";
            body += format_double(per_replication[r][i]);
            body += "\n";
        }
    }
    write_text(path, body);
}

std::vector<std::vector<double>> read_endpoints_csv(const std::string& path) {
    std::vector<std::vector<double>> out;
    read_grouped_csv<3>(path, "replication_id,particle_index,x_t",
                        [&](CsvReader& r, std::int64_t rep, const auto& f) {
        if (rep == static_cast<std::int64_t>(out.size())) out.emplace_back();
        else if (rep + 1 != static_cast<std::int64_t>(out.size()))
            r.fail("replication ids must be contiguous from 0");
        auto& slot = out.back();
        if (parse_field_int(r, f[1]) != static_cast<std::int64_t>(slot.size()))
            r.fail("particle indices must be contiguous from 0");
        slot.push_back(parse_field_double(r, f[2]));
    });
    if (out.empty()) throw std::runtime_error(path + ": no data rows");
    return out;
}

void write_patterns_csv(const std::string& path,
                        const std::vector<PointPattern>& per_replication) {
    std::string body = "replication_id,index_fraction,normalized_value\n";
    for (std::size_t r = 0; r < per_replication.size(); ++r) {
        const std::string prefix = std::to_string(r) + ",";
        for (const PatternPoint& pt : per_replication[r].points) {
            body += prefix;
            body += format_double(pt.index_fraction);
            body += ",";
            body += format_double(pt.value);
            body += "\n";
        }
    }
    write_text(path, body);
}

std::vector<PointPattern> read_patterns_csv(const std::string& path) {
    std::vector<PointPattern> out;
    read_grouped_csv<3>(path, "replication_id,index_fraction,normalized_value",
                        [&](CsvReader& r, std::int64_t rep, const auto& f) {
        if (rep == static_cast<std::int64_t>(out.size())) out.emplace_back();
        else if (rep + 1 != static_cast<std::int64_t>(out.size()))
            r.fail("replication ids must be contiguous from 0");
        auto& slot = out.back();
        slot.points.push_back(
            PatternPoint{parse_field_double(r, f[1]), parse_field_double(r, f[2])});
        slot.n = static_cast<std::int64_t>(slot.points.size());
    });
    if (out.empty()) throw std::runtime_error(path + ": no data rows");
    return out;
}

void write_weights_csv(const std::string& path, const std::vector<WeightRow>& per_replication) {
    std::string body = "replication_id,log_weight,M,quad_variation\n";
    for (std::size_t r = 0; r < per_replication.size(); ++r) {
        body += std::to_string(r);
        body += ",";
        body += format_double(per_replication[r].log_weight);
        body += ",";
        body += format_double(per_replication[r].martingale);
        body += ",";
        body += format_double(per_replication[r].quad_variation);
        body += "\n";
    }
    write_text(path, body);
}

std::vector<WeightRow> read_weights_csv(const std::string& path) {
    std::vector<WeightRow> out;
    read_grouped_csv<4>(path, "replication_id,log_weight,M,quad_variation",
                        [&](CsvReader& r, std::int64_t rep, const auto& f) {
        if (rep != static_cast<std::int64_t>(out.size()))
            r.fail("replication ids must be contiguous from 0");
        out.push_back(WeightRow{parse_field_double(r, f[1]), parse_field_double(r, f[2]),
                                parse_field_double(r, f[3])});
    });
    if (out.empty()) throw std::runtime_error(path + ": no data rows");
    return out;
}

void write_norming_json(const std::string& path, const NormingConstants& norming) {
    nlohmann::ordered_json j;
    j["a"] = norming.a;
    j["b"] = norming.b;
    j["n"] = norming.n;
    j["source"] = to_string(norming.source);
    write_text(path, j.dump(2) + "\n");
}

NormingConstants read_norming_json(const std::string& path) {
    const auto j = nlohmann::json::parse(read_text(path));
    NormingConstants c;
    c.a = j.at("a").get<double>();
    c.b = j.at("b").get<double>();
    c.n = j.at("n").get<std::int64_t>();
    c.source = norming_source_from_string(j.at("source").get<std::string>());
    return c;
}

} // namespace mfe
