#pragma once

#include <string>
#include <vector>

#include "mfe/extremes.hpp"

namespace mfe {

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

// Raw endpoints, one file per system. Columns: replication_id,particle_index,x_t.
// Rows are ordered by replication then particle, so identical data produces
// byte-identical files regardless of how the replications were scheduled.
void write_endpoints_csv(const std::string& path,
                         const std::vector<std::vector<double>>& per_replication);
std::vector<std::vector<double>> read_endpoints_csv(const std::string& path);

// Normalized patterns. Columns: replication_id,index_fraction,normalized_value.
void write_patterns_csv(const std::string& path,
                        const std::vector<PointPattern>& per_replication);
std::vector<PointPattern> read_patterns_csv(const std::string& path);

// Change-of-measure weight summaries.
// Columns: replication_id,log_weight,M,quad_variation.
struct WeightRow {
    double log_weight = 0.0;
    double martingale = 0.0;
    double quad_variation = 0.0;
};
void write_weights_csv(const std::string& path, const std::vector<WeightRow>& per_replication);
std::vector<WeightRow> read_weights_csv(const std::string& path);

void write_norming_json(const std::string& path, const NormingConstants& norming);
NormingConstants read_norming_json(const std::string& path);

} // namespace mfe
