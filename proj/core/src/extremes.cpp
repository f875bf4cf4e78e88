#include "mfe/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mfe/stats.hpp"

namespace mfe {

std::string to_string(NormingSource source) {
    switch (source) {
        case NormingSource::analytic_gaussian: return "analytic-gaussian";
        case NormingSource::analytic_gaussian_quantile: return "analytic-gaussian-quantile";
        case NormingSource::empirical_quantile: return "empirical-quantile";
    }
    throw std::logic_error("to_string: bad NormingSource");
}

NormingSource norming_source_from_string(const std::string& s) {
    if (s == "analytic-gaussian") return NormingSource::analytic_gaussian;
    if (s == "analytic-gaussian-quantile") return NormingSource::analytic_gaussian_quantile;
    if (s == "empirical-quantile") return NormingSource::empirical_quantile;
    throw std::invalid_argument("unknown norming source: " + s);
}

NormingConstants gaussian_norming(std::int64_t n, double m, double s) {
    if (n < 3) throw std::invalid_argument("gaussian_norming: need n >= 3");
    if (!(s > 0.0)) throw std::invalid_argument("gaussian_norming: sd must be positive");
    const double ln = std::log(static_cast<double>(n));
    const double root = std::sqrt(2.0 * ln);
    NormingConstants c;
    c.a = s / root;
    c.b = m + s * (root - (std::log(ln) + std::log(4.0 * std::numbers::pi)) / (2.0 * root));
    c.n = n;
    c.source = NormingSource::analytic_gaussian;
    return c;
}

NormingConstants gaussian_quantile_norming(std::int64_t n, double m, double s) {
    if (n < 2) throw std::invalid_argument("gaussian_quantile_norming: need n >= 2");
    if (!(s > 0.0)) throw std::invalid_argument("gaussian_quantile_norming: sd must be positive");
    const double zq = stats::normal_quantile(1.0 - 1.0 / static_cast<double>(n));
    NormingConstants c;
    c.a = s / (static_cast<double>(n) * stats::normal_pdf(zq));
    c.b = m + s * zq;
    c.n = n;
    c.source = NormingSource::analytic_gaussian_quantile;
    return c;
}

NormingConstants empirical_norming(std::span<const double> calibration, std::int64_t n) {
    if (n < 2) throw std::invalid_argument("empirical_norming: need n >= 2");
    const auto m = static_cast<std::int64_t>(calibration.size());
    if (m < 10 * n)
        throw std::invalid_argument("empirical_norming: calibration sample must have >= 10n values");

    // ceil(m (1 - 1/n)) computed in integer arithmetic (equals m - floor(m/n))
    // so borderline products like 100 * 0.9 cannot round to the wrong index.
    const std::int64_t idx = m - m / n;  // 1-based ascending order statistic
    std::vector<double> sorted(calibration.begin(), calibration.end());
    std::nth_element(sorted.begin(), sorted.begin() + (idx - 1), sorted.end());
    const double b = sorted[static_cast<std::size_t>(idx - 1)];

    double excess_sum = 0.0;
    std::int64_t exceedances = 0;
    for (double v : calibration) {
        if (v > b) {
            excess_sum += v - b;
            ++exceedances;
        }
    }
    if (exceedances < 5)
        throw std::invalid_argument("empirical_norming: fewer than 5 exceedances above the quantile");

    NormingConstants c;
    c.a = excess_sum / static_cast<double>(exceedances);
    c.b = b;
    c.n = n;
    c.source = NormingSource::empirical_quantile;
    return c;
}

PointPattern build_point_pattern(std::span<const double> endpoints,
                                 const NormingConstants& norming) {
    if (static_cast<std::int64_t>(endpoints.size()) != norming.n)
        throw std::invalid_argument("build_point_pattern: endpoint count does not match norming.n");
    if (!(norming.a > 0.0)) throw std::invalid_argument("build_point_pattern: scale must be positive");
    PointPattern p;
    p.n = norming.n;
    p.points.resize(endpoints.size());
    const double dn = static_cast<double>(norming.n);
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        p.points[i].index_fraction = static_cast<double>(i + 1) / dn;
        p.points[i].value = (endpoints[i] - norming.b) / norming.a;
    }
    return p;
}

std::int64_t count_in_rect(const PointPattern& pattern, const Rect& rect) {
    std::int64_t count = 0;
    for (const PatternPoint& pt : pattern.points) {
        if (pt.index_fraction > rect.index_lo && pt.index_fraction <= rect.index_hi &&
            pt.value > rect.value_lo && pt.value <= rect.value_hi)
            ++count;
    }
    return count;
}

std::int64_t count_in_region(const PointPattern& pattern, const RegionSet& region) {
    std::int64_t count = 0;
    for (const Rect& r : region.rects()) count += count_in_rect(pattern, r);
    return count;
}

std::int64_t exceedance_count(const PointPattern& pattern, double x) {
    std::int64_t count = 0;
    for (const PatternPoint& pt : pattern.points)
        if (pt.value >= x) ++count;
    return count;
}

std::vector<double> order_statistics(std::span<const double> endpoints, std::int64_t k) {
    if (k < 1 || k > static_cast<std::int64_t>(endpoints.size()))
        throw std::invalid_argument("order_statistics: k out of range");
    std::vector<double> sorted(endpoints.begin(), endpoints.end());
    const auto kth = sorted.begin() + static_cast<std::ptrdiff_t>(k);
    std::partial_sort(sorted.begin(), kth, sorted.end(), std::greater<double>());
    sorted.resize(static_cast<std::size_t>(k));
    return sorted;
}

} // namespace mfe
