#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfe/regions.hpp"

namespace mfe {

enum class NormingSource {
    analytic_gaussian,           // classical asymptotic expansion
    analytic_gaussian_quantile,  // exact-quantile calibration (default for closed-form models)
    empirical_quantile,          // fitted to a calibration sample
};

std::string to_string(NormingSource source);
NormingSource norming_source_from_string(const std::string& s);

// Location/scale pair (a, b) turning raw time-T endpoints into the
// normalized values (x - b)/a, pinned to the ensemble size they target.
struct NormingConstants {
    double a = 1.0;
    double b = 0.0;
    std::int64_t n = 0;
    NormingSource source = NormingSource::analytic_gaussian;
};

// Classical Gaussian norming for a N(m, s^2) marginal:
//   a = s / sqrt(2 ln n),
//   b = m + s (sqrt(2 ln n) - (ln ln n + ln 4 pi) / (2 sqrt(2 ln n))).
// First-order calibrated: n (1 - Phi((b-m)/s)) -> 1 as n grows, but the
// approach is slow (relative error ~ 1/ln n).
NormingConstants gaussian_norming(std::int64_t n, double m, double s);

// Quantile-calibrated variant: b = m + s Phi^{-1}(1 - 1/n) makes the
// expected number of endpoints above b equal 1 exactly; a = s/(n phi(z_q))
// is the reciprocal hazard there. Tighter at finite n than the expansion.
NormingConstants gaussian_quantile_norming(std::int64_t n, double m, double s);

// Model-free fallback fitted to a calibration sample: b is the empirical
// (1 - 1/n)-quantile (the ceil(M (1-1/n))-th ascending order statistic) and
// a the mean excess above b. Needs M >= 10 n and at least 5 strict
// exceedances.
NormingConstants empirical_norming(std::span<const double> calibration, std::int64_t n);

// Normalized endpoint cloud on the strip (0,1] x R: point i (1-based) sits
// at (i/n, (x_i - b)/a).
struct PointPattern {
    std::vector<PatternPoint> points;
    std::int64_t n = 0;
};

PointPattern build_point_pattern(std::span<const double> endpoints,
                                 const NormingConstants& norming);

std::int64_t count_in_rect(const PointPattern& pattern, const Rect& rect);
std::int64_t count_in_region(const PointPattern& pattern, const RegionSet& region);

// Number of normalized values >= x. The k-th descending normalized order
// statistic is >= x exactly when this count is >= k.
std::int64_t exceedance_count(const PointPattern& pattern, double x);

// Top-k values in descending order, ties kept by multiplicity.
std::vector<double> order_statistics(std::span<const double> endpoints, std::int64_t k);

} // namespace mfe
