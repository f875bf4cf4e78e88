#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mfe/regions.hpp"
#include "mfe/rng.hpp"

namespace mfe {

// Extreme value index gamma with its derived support (x_*, x^*]:
// gamma = 0 -> (-inf, +inf); gamma > 0 -> (-1/gamma, +inf);
// gamma < 0 -> (-inf, -1/gamma]. |gamma| < 1e-10 is treated as 0.
struct TailParams {
    double gamma = 0.0;

    bool is_gumbel() const { return std::abs(gamma) < 1e-10; }
    double lower() const {
        if (is_gumbel() || gamma < 0.0) return -std::numeric_limits<double>::infinity();
        return -1.0 / gamma;
    }
    double upper() const {
        if (is_gumbel() || gamma > 0.0) return std::numeric_limits<double>::infinity();
        return -1.0 / gamma;
    }
};

// Limit law of the normalized maximum: Gamma(x) = exp(-(1 + gamma x)^{-1/gamma}),
// read as exp(-e^{-x}) at gamma = 0; 0 below the support, 1 above it.
double gev_cdf(double x, const TailParams& tail);

// u(x) = (1 + gamma x)^{-1/gamma}, the expected number of limit points with
// value above x. Clamped to +inf at/below x_* and 0 at/above x^*.
double gev_tail_mass(double x, const TailParams& tail);

// nu(region) = sum over rectangles of (b - a) (u(c) - u(d)).
double poisson_intensity(const Rect& r, const TailParams& tail);
double poisson_intensity(const RegionSet& region, const TailParams& tail);

// lambda_j = u(x_j) - u(x_{j-1}) with x_0 = +inf, for nonincreasing thresholds
// above the lower support endpoint.
std::vector<double> lambda_weights(std::span<const double> thresholds, const TailParams& tail);

struct TopkProb {
    double value = 0.0;
    double truncation_error_bound = 0.0;  // sum_j P(Poisson(lambda_j) > truncation)
};

// P(top-1 >= x_1, ..., top-k >= x_k) under the limit point process: the sum of
// products of Poisson weights over occupancy vectors whose partial sums
// dominate (1, ..., k), with each coordinate truncated at `truncation`.
TopkProb topk_joint_prob(std::span<const double> thresholds, const TailParams& tail,
                         std::int64_t truncation = 40);

// ((E_1 + ... + E_j)^{-gamma} - 1)/gamma for j = 1..k; -log of the partial
// sums at gamma = 0. Input must be positive and strictly increasing.
std::vector<double> spacings_from_partial_sums(std::span<const double> sums, const TailParams& tail);

// Joint draw of the k largest limit points via exponential spacings.
std::vector<double> sample_spacings_limit(std::size_t k, const TailParams& tail, Rng& rng);

// One draw of the limit process restricted to values above c: point values in
// decreasing order, index fractions uniform on (0, 1].
std::vector<PatternPoint> sample_poisson_pattern(double c, const TailParams& tail, Rng& rng);

} // namespace mfe
