#include <stdexcept>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mfe/model.hpp"
#include "mfe/rng.hpp"

using namespace mfe;

namespace {

std::vector<double> path1(double x) { return {x}; }

} // namespace

TEST_CASE("ou_moments: stationary parameters stay at (0, 1)") {
    const GaussianMeanFieldParams p{1.0, std::sqrt(2.0), 0.0, 1.0};
    for (double T : {0.3, 1.0, 7.0}) {
        const OuMoments m = ou_moments(p, T);
        CHECK(m.mean == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(m.variance == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("ou_moments: T = 0 returns the initial condition") {
    const GaussianMeanFieldParams p{0.7, 1.3, -2.5, 0.4};
    const OuMoments m = ou_moments(p, 0.0);
    CHECK(m.mean == -2.5);
    CHECK(m.variance == doctest::Approx(0.16).epsilon(1e-14));
}

TEST_CASE("ou_moments: transient variance 1 - e^{-1}") {
    // kappa=0.5, sigma=1, sigma0=0, T=1: variance = (1 - e^{-2*0.5*1}) / (2*0.5)
    const GaussianMeanFieldParams p{0.5, 1.0, 2.0, 0.0};
    const OuMoments m = ou_moments(p, 1.0);
    CHECK(m.mean == 2.0);
    CHECK(m.variance == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("ou_moments: kappa = 0 limit is sigma0^2 + sigma^2 T") {
    const GaussianMeanFieldParams p{0.0, 1.5, 0.0, 2.0};
    const OuMoments m = ou_moments(p, 3.0);
    CHECK(m.variance == doctest::Approx(4.0 + 2.25 * 3.0).epsilon(1e-14));
}

TEST_CASE("ou_moments: variance is nonnegative, continuous, with limit sigma^2/(2 kappa)") {
    const GaussianMeanFieldParams p{2.0, 1.0, 0.0, 3.0};
    double prev = ou_moments(p, 0.0).variance;
    CHECK(prev >= 0.0);
    for (double T = 0.05; T < 5.0; T += 0.05) {
        const double v = ou_moments(p, T).variance;
        CHECK(v >= 0.0);
        CHECK(std::abs(v - ou_moments(p, T + 1e-9).variance) < 1e-7);
        prev = v;
    }
    CHECK(ou_moments(p, 50.0).variance == doctest::Approx(1.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("ou_moments: rejects bad parameters") {
    CHECK_THROWS_AS(ou_moments({1.0, -1.0, 0.0, 1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ou_moments({1.0, 1.0, 0.0, 1.0}, -0.5), std::invalid_argument);
}

TEST_CASE("gaussian model: coefficient formulas") {
    const ModelSpec cancel = make_gaussian_model({1.0, std::sqrt(2.0), 0.0, 1.0});
    const auto x2 = path1(2.0);
    CHECK(cancel.drift(0.3, x2, 2.0) == 0.0);

    const ModelSpec unit = make_gaussian_model({1.0, 1.0, 0.0, 1.0});
    const auto x1 = path1(1.0);
    CHECK(unit.drift(0.0, x1, 0.0) == -1.0);

    const auto y5 = path1(5.0);
    CHECK(cancel.kernel(0.1, x1, y5) == 5.0);
    CHECK(cancel.diffusion(0.7, x2) == std::sqrt(2.0));
    CHECK(cancel.free_drift(0.7, x2) == 0.0);
    CHECK(cancel.structure == MeanFieldStructure::current_mean);
    REQUIRE(cancel.closed_form.has_value());
    CHECK(cancel.closed_form->mean(0.9) == 0.0);
}

TEST_CASE("gaussian model: initial sampler is deterministic given the rng state") {
    const ModelSpec model = make_gaussian_model({1.0, 1.0, -3.0, 0.5});
    Rng a(42), b(42);
    for (int i = 0; i < 16; ++i) CHECK(model.initial_law(a) == model.initial_law(b));
}

TEST_CASE("gaussian model: dB/dr = kappa/sigma everywhere (finite differences)") {
    const double kappa = 1.3, sigma = 0.7;
    const ModelSpec model = make_gaussian_model({kappa, sigma, 0.2, 1.0});
    Rng rng(7);
    for (int trial = 0; trial < 32; ++trial) {
        const auto x = path1(3.0 * rng.normal());
        const double r = 3.0 * rng.normal();
        const double h = 1e-6;
        const double fd = (model.drift(0.5, x, r + h) - model.drift(0.5, x, r - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(kappa / sigma).epsilon(1e-8));
    }
    REQUIRE(model.bounds.has_value());
    CHECK(model.bounds->db_dr == doctest::Approx(kappa / sigma));
    CHECK(model.bounds->d2b_dr2 == 0.0);
}

TEST_CASE("gaussian model: rejects degenerate scales") {
    CHECK_THROWS_AS(make_gaussian_model({1.0, 0.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_gaussian_model({1.0, 1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("rank-based model: drift is the profile at the empirical CDF") {
    RankBasedParams p;
    p.drift_profile = [](double u) { return u; };
    const ModelSpec model = make_rankbased_model(p);

    // positions {1,2,3}, particle at 2: F = 2/3, effective drift A*B = 2/3
    const auto x = path1(2.0);
    const double r = 2.0 / 3.0;
    CHECK(model.diffusion(0.0, x) * model.drift(0.0, x, r) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(model.diffusion(0.0, x) == std::sqrt(2.0));
    CHECK(model.structure == MeanFieldStructure::empirical_cdf);
    CHECK_FALSE(model.closed_form.has_value());

    // kernel is the tie-inclusive indicator 1{y_t <= x_t}
    CHECK(model.kernel(0.0, x, path1(2.0)) == 1.0);
    CHECK(model.kernel(0.0, x, path1(2.0000001)) == 0.0);
    CHECK(model.kernel(0.0, x, path1(-5.0)) == 1.0);
}

TEST_CASE("rank-based model: particle at the maximum of N=4 gets drift 1") {
    RankBasedParams p;
    p.drift_profile = [](double u) { return u; };
    const ModelSpec model = make_rankbased_model(p);
    const auto x = path1(9.0);
    CHECK(model.diffusion(0.0, x) * model.drift(0.0, x, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rank-based model: zero profile degenerates to Brownian motion with A = sqrt(2)") {
    RankBasedParams p;
    p.drift_profile = [](double) { return 0.0; };
    const ModelSpec model = make_rankbased_model(p);
    const auto x = path1(0.3);
    for (double r : {0.0, 0.25, 0.5, 1.0}) CHECK(model.drift(0.0, x, r) == 0.0);
    CHECK(model.diffusion(0.0, x) == std::sqrt(2.0));
}

TEST_CASE("rank-based model: exhaustive empirical-CDF drift check for N <= 6") {
    RankBasedParams p;
    p.drift_profile = [](double u) { return std::sin(u) - 0.3; };
    const ModelSpec model = make_rankbased_model(p);

    Rng rng(11);
    for (int n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> pos(static_cast<std::size_t>(n));
            for (double& v : pos) v = rng.normal();
            if (trial % 3 == 0 && n >= 2) pos[1] = pos[0];  // force ties
            for (int i = 0; i < n; ++i) {
                int count = 0;
                for (int j = 0; j < n; ++j)
                    if (pos[static_cast<std::size_t>(j)] <= pos[static_cast<std::size_t>(i)]) ++count;
                const double F = static_cast<double>(count) / n;
                const auto xi = path1(pos[static_cast<std::size_t>(i)]);
                const double drift = model.diffusion(0.0, xi) * model.drift(0.0, xi, F);
                CHECK(drift == doctest::Approx(p.drift_profile(F)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("rank-based model: default initial law is standard normal") {
    RankBasedParams p;
    p.drift_profile = [](double u) { return u - 0.5; };
    const ModelSpec model = make_rankbased_model(p);
    Rng rng(99);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = model.initial_law(rng);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("rank-based model: missing profile is rejected") {
    CHECK_THROWS_AS(make_rankbased_model(RankBasedParams{}), std::invalid_argument);
}
