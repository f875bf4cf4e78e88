#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mfe/extremes.hpp"
#include "mfe/rng.hpp"
#include "mfe/stats.hpp"

using namespace mfe;

TEST_CASE("norming source names round-trip") {
    for (NormingSource s : {NormingSource::analytic_gaussian, NormingSource::analytic_gaussian_quantile,
                            NormingSource::empirical_quantile})
        CHECK(norming_source_from_string(to_string(s)) == s);
    CHECK(to_string(NormingSource::analytic_gaussian) == "analytic-gaussian");
    CHECK(to_string(NormingSource::empirical_quantile) == "empirical-quantile");
    CHECK_THROWS_AS(norming_source_from_string("nope"), std::invalid_argument);
}

TEST_CASE("gaussian_norming: affine equivariance and monotone scale") {
    const NormingConstants base = gaussian_norming(500, 0.0, 1.0);
    const NormingConstants moved = gaussian_norming(500, -2.0, 3.0);
    CHECK(moved.a == doctest::Approx(3.0 * base.a).epsilon(1e-14));
    CHECK(moved.b == doctest::Approx(-2.0 + 3.0 * base.b).epsilon(1e-14));
    CHECK(moved.n == 500);
    CHECK(moved.source == NormingSource::analytic_gaussian);

    double prev = std::numeric_limits<double>::infinity();
    for (std::int64_t n : {10, 100, 10000, 1000000}) {
        const NormingConstants c = gaussian_norming(n, 0.0, 1.0);
        CHECK(c.a > 0.0);
        CHECK(c.a < prev);
        prev = c.a;
    }
}

TEST_CASE("gaussian_norming: first-order tail calibration at N = 10^6") {
    const NormingConstants c = gaussian_norming(1000000, 0.0, 1.0);
    const double expected = 1e6 * (1.0 - stats::normal_cdf(c.b));
    CHECK(expected > 0.85);
    CHECK(expected < 1.15);
}

TEST_CASE("gaussian_norming: rejects N < 3 and bad scale") {
    CHECK_THROWS_AS(gaussian_norming(2, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_norming(100, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("gaussian_quantile_norming: exact unit expected exceedance count") {
    for (std::int64_t n : {10, 1000, 100000}) {
        const NormingConstants c = gaussian_quantile_norming(n, 0.0, 1.0);
        const double count = static_cast<double>(n) * (1.0 - stats::normal_cdf(c.b));
        CHECK(count == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(c.a > 0.0);
        CHECK(c.source == NormingSource::analytic_gaussian_quantile);
    }
    const NormingConstants scaled = gaussian_quantile_norming(1000, 2.0, 3.0);
    const double count = 1000.0 * (1.0 - stats::normal_cdf((scaled.b - 2.0) / 3.0));
    CHECK(count == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(gaussian_quantile_norming(1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("empirical_norming: direct evaluation on 1..100") {
    std::vector<double> xs(100);
    for (int i = 0; i < 100; ++i) xs[static_cast<std::size_t>(i)] = i + 1.0;
    const NormingConstants c = empirical_norming(xs, 10);
    CHECK(c.b == 90.0);
    CHECK(c.a == doctest::Approx(5.5).epsilon(1e-14));
    CHECK(c.n == 10);
    CHECK(c.source == NormingSource::empirical_quantile);
}

TEST_CASE("empirical_norming: degenerate and undersized samples are rejected") {
    const std::vector<double> flat(200, 1.0);
    CHECK_THROWS_AS(empirical_norming(flat, 10), std::invalid_argument);
    const std::vector<double> small(50, 1.0);
    CHECK_THROWS_AS(empirical_norming(small, 10), std::invalid_argument);
}

TEST_CASE("empirical_norming: Gumbel calibration sample gives scale near 1") {
    Rng rng(31337, 0, StreamRole::calibration);
    std::vector<double> xs(400000);
    for (double& v : xs) v = -std::log(rng.exponential());  // standard Gumbel
    const NormingConstants c = empirical_norming(xs, 1000);
    CHECK(c.a == doctest::Approx(1.0).epsilon(0.2));
    CHECK(c.b == doctest::Approx(std::log(1000.0)).epsilon(0.05));
}

TEST_CASE("build_point_pattern: direct arithmetic and identity norming") {
    NormingConstants c;
    c.a = 2.0;
    c.b = 1.0;
    c.n = 2;
    const PointPattern p = build_point_pattern(std::vector<double>{3.0, 5.0}, c);
    REQUIRE(p.points.size() == 2);
    CHECK(p.points[0].index_fraction == 0.5);
    CHECK(p.points[0].value == 1.0);
    CHECK(p.points[1].index_fraction == 1.0);
    CHECK(p.points[1].value == 2.0);
    CHECK(p.n == 2);

    NormingConstants ident;
    ident.a = 1.0;
    ident.b = 0.0;
    ident.n = 3;
    const std::vector<double> raw{-0.5, 0.25, 7.0};
    const PointPattern q = build_point_pattern(raw, ident);
    for (std::size_t i = 0; i < 3; ++i) CHECK(q.points[i].value == raw[i]);

    NormingConstants single;
    single.a = 4.0;
    single.b = -2.0;
    single.n = 1;
    const PointPattern s = build_point_pattern(std::vector<double>{6.0}, single);
    REQUIRE(s.points.size() == 1);
    CHECK(s.points[0].index_fraction == 1.0);
    CHECK(s.points[0].value == 2.0);
}

TEST_CASE("build_point_pattern: count mismatch and bad scale are rejected") {
    NormingConstants c;
    c.a = 1.0;
    c.n = 3;
    CHECK_THROWS_AS(build_point_pattern(std::vector<double>{1.0, 2.0}, c), std::invalid_argument);
    c.n = 2;
    c.a = 0.0;
    CHECK_THROWS_AS(build_point_pattern(std::vector<double>{1.0, 2.0}, c), std::invalid_argument);
}

TEST_CASE("build_point_pattern: un-normalizing recovers the endpoints") {
    Rng rng(404);
    NormingConstants c;
    c.a = 0.37;
    c.b = 3.1;
    c.n = 64;
    std::vector<double> xs(64);
    for (double& v : xs) v = 4.0 * rng.normal();
    const PointPattern p = build_point_pattern(xs, c);
    for (std::size_t i = 0; i < 64; ++i)
        CHECK(std::abs(p.points[i].value * c.a + c.b - xs[i]) <= 1e-12);
}

TEST_CASE("count_in_rect and count_in_region: boundary semantics") {
    NormingConstants ident;
    ident.a = 1.0;
    ident.b = 0.0;
    ident.n = 2;
    const PointPattern p = build_point_pattern(std::vector<double>{1.0, 2.0}, ident);
    // points: (0.5, 1), (1.0, 2)

    CHECK(count_in_rect(p, Rect{0.0, 1.0, 1.5, 3.0}) == 1);
    CHECK(count_in_rect(p, Rect{0.0, 1.0, -100.0, std::numeric_limits<double>::infinity()}) == 2);

    // value exactly at the left cut c is excluded, at the right cut d included
    CHECK(count_in_rect(p, Rect{0.0, 1.0, 1.0, 3.0}) == 1);
    CHECK(count_in_rect(p, Rect{0.0, 1.0, 0.0, 1.0}) == 1);
    // index exactly at the left cut excluded, at the right cut included
    CHECK(count_in_rect(p, Rect{0.5, 1.0, 0.0, 3.0}) == 1);
    CHECK(count_in_rect(p, Rect{0.0, 0.5, 0.0, 3.0}) == 1);

    const RegionSet split({Rect{0.0, 0.5, 0.0, 3.0}, Rect{0.5, 1.0, 0.0, 3.0}});
    CHECK(count_in_region(p, split) == 2);
}

TEST_CASE("count_in_region: additivity over random disjoint splits") {
    Rng rng(606);
    NormingConstants c;
    c.a = 1.0;
    c.b = 0.0;
    c.n = 50;
    std::vector<double> xs(50);
    for (double& v : xs) v = 2.0 * rng.normal();
    const PointPattern p = build_point_pattern(xs, c);

    for (int trial = 0; trial < 20; ++trial) {
        const double cut_i = 0.02 + 0.96 * rng.uniform();
        const double cut_v = std::clamp(2.0 * rng.normal(), -4.5, 4.5);
        const Rect whole{0.0, 1.0, -5.0, 5.0};
        const RegionSet quads({Rect{0.0, cut_i, -5.0, cut_v}, Rect{0.0, cut_i, cut_v, 5.0},
                               Rect{cut_i, 1.0, -5.0, cut_v}, Rect{cut_i, 1.0, cut_v, 5.0}});
        CHECK(count_in_region(p, quads) == count_in_rect(p, whole));
    }
}

TEST_CASE("RegionSet: validation") {
    CHECK_THROWS_AS(RegionSet({Rect{0.5, 0.5, 0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(RegionSet({Rect{0.0, 1.2, 0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(RegionSet({Rect{0.0, 1.0, 2.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(RegionSet({Rect{0.0, 0.6, 0.0, 1.0}, Rect{0.4, 1.0, 0.5, 2.0}}),
                    std::invalid_argument);
    // touching along a shared edge is allowed (half-open rectangles are disjoint)
    CHECK_NOTHROW(RegionSet({Rect{0.0, 0.5, 0.0, 1.0}, Rect{0.5, 1.0, 0.0, 1.0}}));
    CHECK_NOTHROW(RegionSet({Rect{0.0, 1.0, 0.0, 1.0}, Rect{0.0, 1.0, 1.0, 2.0}}));
}

TEST_CASE("exceedance_count matches the order-statistics representation") {
    Rng rng(808);
    NormingConstants c;
    c.a = 1.0;
    c.b = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.bits() % 12);
        c.n = static_cast<std::int64_t>(n);
        std::vector<double> xs(n);
        for (double& v : xs) v = std::round(rng.normal() * 4.0) / 4.0;  // force ties
        const PointPattern p = build_point_pattern(xs, c);
        const std::vector<double> top = order_statistics(xs, static_cast<std::int64_t>(n));
        for (double x = -3.0; x <= 3.0; x += 0.25) {
            const std::int64_t count = exceedance_count(p, x);
            for (std::size_t k = 1; k <= n; ++k) {
                const bool via_count = count >= static_cast<std::int64_t>(k);
                const bool via_order = top[k - 1] >= x;
                CHECK(via_count == via_order);
            }
        }
    }
}

TEST_CASE("order_statistics: sorting, ties, and range checks") {
    const std::vector<double> xs{3.0, 1.0, 2.0};
    const std::vector<double> top2 = order_statistics(xs, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0] == 3.0);
    CHECK(top2[1] == 2.0);

    const std::vector<double> full = order_statistics(xs, 3);
    CHECK(full == std::vector<double>{3.0, 2.0, 1.0});

    const std::vector<double> ties{5.0, 5.0, 5.0, 1.0};
    const std::vector<double> top3 = order_statistics(ties, 3);
    CHECK(top3 == std::vector<double>{5.0, 5.0, 5.0});

    CHECK_THROWS_AS(order_statistics(xs, 0), std::invalid_argument);
    CHECK_THROWS_AS(order_statistics(xs, 4), std::invalid_argument);
}
