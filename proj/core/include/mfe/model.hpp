#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mfe/array2d.hpp"
#include "mfe/rng.hpp"

namespace mfe {

// Dynamics simulated here:
//
//   dX_t = A(t, X)( B(t, X, r_t) dt + dW_t ) + C(t, X) dt,   X_0 ~ nu_0,
//
// where the interaction value r_t = \int g(t, X, y) mu_t(dy) is computed
// against either the co-simulated ensemble or a frozen law. Coefficients see
// the whole discretized path prefix; the built-in models read only the
// current value.
using CoeffFn = std::function<double(double, PathView)>;
using DriftFn = std::function<double(double, PathView, double)>;
using KernelFn = std::function<double(double, PathView, PathView)>;
using SamplerFn = std::function<double(Rng&)>;

// Structure of the interaction kernel; selects the bulk evaluation strategy.
enum class MeanFieldStructure {
    generic,        // arbitrary kernel, O(M) work per query
    current_mean,   // g(t,x,y) = y_t: one running mean serves every query
    empirical_cdf,  // g(t,x,y) = 1{y_t <= x_t}: sorted snapshot + binary search
    unused,         // B does not read r; skip the interaction evaluation
};

// Analytic description of the limit law, when available. mean_field returns
// r_t for a query path directly, bypassing any simulated cloud.
struct ClosedFormLaw {
    std::function<double(double)> mean;                  // t -> E[X_t]
    std::function<double(double)> variance;              // t -> Var[X_t]
    std::function<double(double, PathView)> mean_field;  // (t, query prefix) -> r
};

// Declared coefficient bounds: |A| and |C| bounds, and bounds on the first two
// r-derivatives of B. Checked by finite differences in the tests.
struct CoefficientBounds {
    double diffusion = 0.0;
    double free_drift = 0.0;
    double db_dr = 0.0;
    double d2b_dr2 = 0.0;
};

struct ModelSpec {
    std::string name;
    CoeffFn diffusion;       // A
    DriftFn drift;           // B
    CoeffFn free_drift;      // C
    KernelFn kernel;         // g; may be empty only when structure == unused
    SamplerFn initial_law;   // nu_0
    MeanFieldStructure structure = MeanFieldStructure::generic;
    std::optional<ClosedFormLaw> closed_form;
    std::optional<CoefficientBounds> bounds;
};

// Mean-field Ornstein-Uhlenbeck: A = sigma, B(t,x,r) = -kappa (x_t - r)/sigma,
// C = 0, g(t,x,y) = y_t, nu_0 = N(m0, sigma0^2).
struct GaussianMeanFieldParams {
    double kappa = 1.0;
    double sigma = 1.0;
    double m0 = 0.0;
    double sigma0 = 1.0;
};

struct OuMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// Marginal mean and variance of the mean-field OU law at time T:
// mean stays at m0, variance is sigma0^2 e^{-2 kappa T} + sigma^2 (1 - e^{-2 kappa T})/(2 kappa),
// with the kappa = 0 limit sigma0^2 + sigma^2 T.
OuMoments ou_moments(const GaussianMeanFieldParams& p, double T);

ModelSpec make_gaussian_model(const GaussianMeanFieldParams& p);

// Rank-based diffusion: A = sqrt(2), C = 0, g(t,x,y) = 1{y_t <= x_t} (the
// particle counts itself, ties count), B(t,x,r) = drift_profile(r)/sqrt(2),
// so the drift applied to a particle is drift_profile(empirical CDF at its
// own position).
struct RankBasedParams {
    std::function<double(double)> drift_profile;  // on [0, 1]
    SamplerFn initial_law;                        // default: standard normal
    double profile_derivative_bound = 1.0;
};

ModelSpec make_rankbased_model(const RankBasedParams& p);

} // namespace mfe
