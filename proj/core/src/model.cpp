#include "mfe/model.hpp"

#include <cmath>
#include <stdexcept>

namespace mfe {

OuMoments ou_moments(const GaussianMeanFieldParams& p, double T) {
    if (p.sigma <= 0.0) throw std::invalid_argument("ou_moments: sigma must be positive");
    if (p.sigma0 < 0.0) throw std::invalid_argument("ou_moments: sigma0 must be nonnegative");
    if (!(T >= 0.0)) throw std::invalid_argument("ou_moments: T must be nonnegative");
    double v;
    if (p.kappa == 0.0) {
        v = p.sigma0 * p.sigma0 + p.sigma * p.sigma * T;
    } else {
        const double e = std::exp(-2.0 * p.kappa * T);
        // (1 - e^{-2 kappa T}) / (2 kappa), stable for small kappa
        const double w = -std::expm1(-2.0 * p.kappa * T) / (2.0 * p.kappa);
        v = p.sigma0 * p.sigma0 * e + p.sigma * p.sigma * w;
    }
    return {p.m0, v};
}

ModelSpec make_gaussian_model(const GaussianMeanFieldParams& p) {
    if (p.sigma <= 0.0) throw std::invalid_argument("make_gaussian_model: sigma must be positive");
    if (p.sigma0 <= 0.0) throw std::invalid_argument("make_gaussian_model: sigma0 must be positive");

    const double kappa = p.kappa, sigma = p.sigma, m0 = p.m0, sigma0 = p.sigma0;

    ModelSpec m;
    m.name = "gaussian";
    m.diffusion = [sigma](double, PathView) { return sigma; };
    m.drift = [kappa, sigma](double, PathView x, double r) { return -kappa * (x.back() - r) / sigma; };
    m.free_drift = [](double, PathView) { return 0.0; };
    m.kernel = [](double, PathView, PathView y) { return y.back(); };
    m.initial_law = [m0, sigma0](Rng& rng) { return m0 + sigma0 * rng.normal(); };
    m.structure = MeanFieldStructure::current_mean;

    ClosedFormLaw law;
    law.mean = [m0](double) { return m0; };
    law.variance = [p](double t) { return ou_moments(p, t).variance; };
    law.mean_field = [m0](double, PathView) { return m0; };
    m.closed_form = std::move(law);

    m.bounds = CoefficientBounds{sigma, 0.0, std::abs(kappa) / sigma, 0.0};
    return m;
}

ModelSpec make_rankbased_model(const RankBasedParams& p) {
    if (!p.drift_profile) throw std::invalid_argument("make_rankbased_model: drift_profile is required");

    const double sqrt2 = std::sqrt(2.0);
    auto profile = p.drift_profile;

    ModelSpec m;
    m.name = "rankbased";
    m.diffusion = [sqrt2](double, PathView) { return sqrt2; };
    m.drift = [profile, sqrt2](double, PathView, double r) { return profile(r) / sqrt2; };
    m.free_drift = [](double, PathView) { return 0.0; };
    m.kernel = [](double, PathView x, PathView y) { return y.back() <= x.back() ? 1.0 : 0.0; };
    m.initial_law = p.initial_law ? p.initial_law
                                  : SamplerFn{[](Rng& rng) { return rng.normal(); }};
    m.structure = MeanFieldStructure::empirical_cdf;
    m.bounds = CoefficientBounds{sqrt2, 0.0, p.profile_derivative_bound / sqrt2, 0.0};
    return m;
}

} // namespace mfe
