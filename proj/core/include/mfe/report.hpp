#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mfe/extremes.hpp"

namespace mfe {

// One statistical check: passes when lower <= statistic <= upper. Records
// flagged mandatory decide the report verdict; the rest are informational.
struct TestRecord {
    std::string name;
    double statistic = 0.0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    bool pass = false;
    bool mandatory = true;
    std::int64_t sample_size = 0;
    std::string note;
};

TestRecord make_record(std::string name, double statistic, double lower, double upper,
                       bool mandatory, std::int64_t sample_size, std::string note = {});

struct Report {
    std::string model;
    std::string version;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::int64_t particles = 0;
    std::int64_t replications = 0;
    NormingConstants norming;
    std::optional<double> effective_sample_size;
    std::vector<TestRecord> records;

    // Pass iff every mandatory record passes (pure function of the records).
    bool verdict() const;
    const TestRecord* find(const std::string& name) const;
};

std::string report_to_json(const Report& report);
Report report_from_json(const std::string& text);

void save_report(const Report& report, const std::string& path);
Report load_report(const std::string& path);

// Fixed-width text table, one row per record, verdict line at the end.
std::string render_report_table(const Report& report);

} // namespace mfe
