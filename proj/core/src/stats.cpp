#include "mfe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfe::stats {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace {

// Acklam's rational approximation to the normal quantile (~1e-9), refined below.
double normal_quantile_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    double x = normal_quantile_approx(p);
    // one Halley step against the exact CDF
    for (int it = 0; it < 2; ++it) {
        double e = normal_cdf(x) - p;
        double u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double gumbel_cdf(double x) {
    return std::exp(-std::exp(-x));
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance: need at least two values");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

double quantile_ordstat(std::span<const double> xs, double p) {
    if (xs.empty()) throw std::invalid_argument("quantile_ordstat: empty sample");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_ordstat: p must lie in (0, 1]");
    std::vector<double> v(xs.begin(), xs.end());
    std::size_t idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
    if (idx < 1) idx = 1;
    if (idx > v.size()) idx = v.size();
    std::nth_element(v.begin(), v.begin() + (idx - 1), v.end());
    return v[idx - 1];
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double poisson_pmf(double lambda, std::int64_t k) {
    if (lambda < 0.0 || k < 0) throw std::invalid_argument("poisson_pmf: bad arguments");
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

double poisson_tail(double lambda, std::int64_t k) {
    if (lambda < 0.0 || k < 0) throw std::invalid_argument("poisson_tail: bad arguments");
    if (lambda == 0.0) return 0.0;
    double term = poisson_pmf(lambda, k + 1);
    double s = 0.0;
    for (std::int64_t i = k + 1;; ++i) {
        s += term;
        term *= lambda / static_cast<double>(i + 1);
        if (term < s * 1e-18 + 1e-300) break;
    }
    return s;
}

CountTest count_distribution_test(std::span<const std::int64_t> counts, double nu) {
    if (counts.size() < 100)
        throw std::invalid_argument("count_distribution_test: need at least 100 counts");
    const double n = static_cast<double>(counts.size());
    double m = 0.0;
    for (auto c : counts) m += static_cast<double>(c);
    m /= n;
    double v = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - m;
        v += d * d;
    }
    v /= (n - 1.0);

    CountTest out;
    const double se = std::sqrt(v / n);
    const double diff = m - nu;
    if (se > 0.0) {
        out.mean_z = diff / se;
    } else {
        out.mean_z = diff == 0.0 ? 0.0
                                 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    if (m > 0.0) out.dispersion = v / m;
    return out;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace mfe::stats
