#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfe/regions.hpp"

namespace mfe {

// Everything one experiment needs, resolvable from a key-value config file
// plus key=value command-line overrides. Field comments give the file keys.
struct ExperimentConfig {
    // model selection
    std::string model = "gaussian";  // model: gaussian | rankbased

    // mean-reverting Gaussian model parameters
    double kappa = 1.0;                      // kappa
    double sigma = 1.4142135623730951;       // sigma (default sqrt(2))
    double m0 = 0.0;                         // m0
    double sigma0 = 1.0;                     // sigma0

    // rank-based model: drift profile p(u) = rank_slope * u + rank_offset
    double rank_slope = 1.0;                 // rank_slope
    double rank_offset = -0.5;               // rank_offset

    // simulation
    std::int64_t particles = 1000;           // particles
    std::int64_t steps = 100;                // steps
    double horizon = 1.0;                    // T
    std::uint64_t seed = 12345;              // seed
    std::int64_t replications = 2000;        // replications
    bool compute_weights = true;             // compute_weights

    // law cloud (used when the model has no closed form)
    std::int64_t cloud_paths = 100000;       // cloud_paths
    int cloud_picard = 3;                    // cloud_picard
    double cloud_tolerance = 0.05;           // cloud_tolerance

    // norming and limit comparison
    std::string norming = "auto";  // norming: auto | gaussian-quantile | gaussian-asymptotic | empirical
    double gamma = 0.0;                      // gamma
    std::vector<Rect> regions = {Rect{}};    // regions: "a,b,c,d[;a,b,c,d...]", d may be inf
    std::int64_t topk = 3;                   // topk
    std::vector<double> topk_thresholds = {1.0, 0.5, 0.0};  // topk_thresholds: comma list
    std::int64_t topk_truncation = 40;       // topk_truncation

    // test thresholds
    double ks_coeff = 1.63;                  // ks_coeff (two-sample KS passes at D < ks_coeff*sqrt(2/R))
    double z_max = 3.0;                      // z_max
    double dispersion_lo = 0.85;             // dispersion_lo
    double dispersion_hi = 1.15;             // dispersion_hi
    double gev_ks_max = 0.08;                // gev_ks_max
    double topk_bias_budget = 0.02;          // topk_bias_budget

    // execution and artifacts (excluded from the config hash)
    int workers = 0;                         // workers (0 = MFE_WORKERS env or 1)
    std::string output = "out";              // output
    bool save_patterns = true;               // save_patterns
    bool save_paths = false;                 // save_paths
};

// Defaults overlaid with the file's key = value lines ('#' comments allowed).
ExperimentConfig parse_config_file(const std::string& path);

// Applies one "key=value" override (same keys as the file).
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

void validate_config(const ExperimentConfig& cfg);

// Canonical "key = value" rendering of the semantic keys (execution and
// artifact keys excluded), used for hashing and reproducibility.
std::string canonical_config(const ExperimentConfig& cfg);

// FNV-1a hash of canonical_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

std::string format_regions(const std::vector<Rect>& regions);
std::vector<Rect> parse_regions(const std::string& text);

} // namespace mfe
