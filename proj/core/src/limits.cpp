#include "mfe/limits.hpp"

#include <algorithm>
#include <stdexcept>

#include "mfe/stats.hpp"

namespace mfe {

double gev_tail_mass(double x, const TailParams& tail) {
    if (tail.is_gumbel()) return std::exp(-x);
    if (x >= tail.upper()) return 0.0;
    if (x <= tail.lower()) return std::numeric_limits<double>::infinity();
    return std::exp(-std::log1p(tail.gamma * x) / tail.gamma);
}

double gev_cdf(double x, const TailParams& tail) {
    const double u = gev_tail_mass(x, tail);
    return std::isinf(u) ? 0.0 : std::exp(-u);
}

double poisson_intensity(const Rect& r, const TailParams& tail) {
    const double uc = gev_tail_mass(r.value_lo, tail);
    const double ud = gev_tail_mass(r.value_hi, tail);
    if (std::isinf(uc) && std::isinf(ud)) return 0.0;  // rectangle below the support
    return (r.index_hi - r.index_lo) * (uc - ud);
}

double poisson_intensity(const RegionSet& region, const TailParams& tail) {
    double s = 0.0;
    for (const Rect& r : region.rects()) s += poisson_intensity(r, tail);
    return s;
}

std::vector<double> lambda_weights(std::span<const double> thresholds, const TailParams& tail) {
    if (thresholds.empty()) throw std::invalid_argument("lambda_weights: empty thresholds");
    std::vector<double> lam;
    lam.reserve(thresholds.size());
    double u_prev = 0.0;  // u(+inf)
    double x_prev = std::numeric_limits<double>::infinity();
    for (double x : thresholds) {
        if (x > x_prev)
            throw std::invalid_argument("lambda_weights: thresholds must be nonincreasing");
        const double u = gev_tail_mass(x, tail);
        if (std::isinf(u))
            throw std::invalid_argument("lambda_weights: threshold at or below the lower support endpoint");
        lam.push_back(u - u_prev);
        u_prev = u;
        x_prev = x;
    }
    return lam;
}

TopkProb topk_joint_prob(std::span<const double> thresholds, const TailParams& tail,
                         std::int64_t truncation) {
    if (truncation < 1) throw std::invalid_argument("topk_joint_prob: truncation must be >= 1");
    const std::vector<double> lam = lambda_weights(thresholds, tail);
    const std::size_t k = lam.size();

    // dp[s] = probability that the running count equals s (saturated at k)
    // and every prefix constraint seen so far holds. Once the running count
    // reaches k all later prefix constraints hold automatically.
    std::vector<double> dp(k + 1, 0.0), next(k + 1, 0.0);
    dp[0] = 1.0;
    std::vector<double> pmf(static_cast<std::size_t>(truncation) + 1);
    for (std::size_t j = 1; j <= k; ++j) {
        for (std::int64_t i = 0; i <= truncation; ++i)
            pmf[static_cast<std::size_t>(i)] = stats::poisson_pmf(lam[j - 1], i);
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s <= k; ++s) {
            if (dp[s] == 0.0) continue;
            for (std::int64_t i = 0; i <= truncation; ++i) {
                const std::size_t s2 = std::min(s + static_cast<std::size_t>(i), k);
                next[s2] += dp[s] * pmf[static_cast<std::size_t>(i)];
            }
        }
        for (std::size_t s = 0; s < j && s <= k; ++s) next[s] = 0.0;
        dp.swap(next);
    }

    double bound = 0.0;
    for (double l : lam) bound += stats::poisson_tail(l, truncation);
    return {dp[k], bound};
}

std::vector<double> spacings_from_partial_sums(std::span<const double> sums, const TailParams& tail) {
    if (sums.empty()) throw std::invalid_argument("spacings_from_partial_sums: empty input");
    std::vector<double> out;
    out.reserve(sums.size());
    double prev = 0.0;
    for (double s : sums) {
        if (!(s > prev))
            throw std::invalid_argument("spacings_from_partial_sums: sums must be positive and strictly increasing");
        if (tail.is_gumbel()) {
            out.push_back(-std::log(s));
        } else {
            // (s^{-gamma} - 1)/gamma, continuous in gamma
            out.push_back(std::expm1(-tail.gamma * std::log(s)) / tail.gamma);
        }
        prev = s;
    }
    return out;
}

std::vector<double> sample_spacings_limit(std::size_t k, const TailParams& tail, Rng& rng) {
    if (k == 0) throw std::invalid_argument("sample_spacings_limit: k must be >= 1");
    std::vector<double> sums(k);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        s += rng.exponential();
        sums[j] = s;
    }
    return spacings_from_partial_sums(sums, tail);
}

std::vector<PatternPoint> sample_poisson_pattern(double c, const TailParams& tail, Rng& rng) {
    const double cap = gev_tail_mass(c, tail);  // expected number of points above c
    if (std::isinf(cap))
        throw std::invalid_argument("sample_poisson_pattern: c at or below the lower support endpoint");
    std::vector<PatternPoint> out;
    double s = 0.0;
    for (;;) {
        s += rng.exponential();
        if (s >= cap) break;
        const double v = tail.is_gumbel() ? -std::log(s)
                                          : std::expm1(-tail.gamma * std::log(s)) / tail.gamma;
        out.push_back({rng.uniform(), v});
    }
    return out;
}

} // namespace mfe
