#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mfe::stats {

double normal_cdf(double x);
double normal_pdf(double x);

// Inverse of normal_cdf on (0, 1); accurate to ~1e-15 (rational approximation
// plus one Halley refinement against erfc).
double normal_quantile(double p);

double gumbel_cdf(double x);

double mean(std::span<const double> xs);
// Unbiased sample variance; needs at least two values.
double variance(std::span<const double> xs);

// p-quantile as the ceil(n p)-th ascending order statistic (1-based).
double quantile_ordstat(std::span<const double> xs, double p);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a - F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// One-sample statistic against a continuous CDF.
double ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf);

double poisson_pmf(double lambda, std::int64_t k);
// P(X > k) for X ~ Poisson(lambda), summed upward (no cancellation).
double poisson_tail(double lambda, std::int64_t k);

struct CountTest {
    double mean_z = 0.0;                // (sample mean - nu) / (sd / sqrt(R))
    std::optional<double> dispersion;   // sample variance / sample mean; empty when mean is 0
};

// z-statistic of the sample mean against a target intensity nu, plus the
// dispersion index. Requires at least 100 counts.
CountTest count_distribution_test(std::span<const std::int64_t> counts, double nu);

std::uint64_t fnv1a(std::string_view s);

} // namespace mfe::stats
