#include "mfe/girsanov.hpp"

#include <cmath>
#include <stdexcept>

namespace mfe {

double WeightRecord::weight() const { return std::exp(log_weight); }

double delta_b(std::size_t i, std::int64_t k, const TrajectoryBatch& batch,
               const FrozenLaw& law, const ModelSpec& model) {
    if (i >= batch.paths()) throw std::invalid_argument("delta_b: particle index out of range");
    if (k < 0 || k >= static_cast<std::int64_t>(batch.values.cols()))
        throw std::invalid_argument("delta_b: grid index out of range");
    if (const TimeGrid* g = law.grid(); g && !(*g == batch.grid))
        throw std::invalid_argument("delta_b: law grid does not match the batch grid");
    const double t = batch.grid.time(k);
    const auto view = batch.view_at(k);
    const auto cache = make_mean_field_cache(model, view);
    const PathView x = view.prefix(i);
    const double r_emp = mean_field_query(model, t, x, view, cache);
    const double r_law = law.value(model, k, t, x);
    return model.drift(t, x, r_emp) - model.drift(t, x, r_law);
}

WeightRecord girsanov_weight(const TrajectoryBatch& batch, const FrozenLaw& law,
                             const ModelSpec& model) {
    if (batch.increments.empty())
        throw std::invalid_argument("girsanov_weight: batch has no recorded increments");
    if (const TimeGrid* g = law.grid(); g && !(*g == batch.grid))
        throw std::invalid_argument("girsanov_weight: law grid does not match the batch grid");

    const std::size_t n = batch.paths();
    const double dt = batch.grid.dt();
    WeightRecord rec;
    rec.per_particle.assign(n, {});

    std::vector<double> r_emp(n), r_law(n);
    for (std::int64_t k = 0; k < batch.grid.steps; ++k) {
        const double t = batch.grid.time(k);
        const auto view = batch.view_at(k);
        const auto cache = make_mean_field_cache(model, view);
        for (std::size_t i = 0; i < n; ++i)
            r_emp[i] = mean_field_query(model, t, view.prefix(i), view, cache);
        law.bulk(model, k, t, view, r_law);
        for (std::size_t i = 0; i < n; ++i) {
            const PathView x = view.prefix(i);
            const double db = model.drift(t, x, r_emp[i]) - model.drift(t, x, r_law[i]);
            auto& c = rec.per_particle[i];
            c.martingale += db * batch.increments(i, static_cast<std::size_t>(k));
            c.quad_variation += db * db * dt;
        }
    }

    for (const auto& c : rec.per_particle) {
        rec.martingale += c.martingale;
        rec.quad_variation += c.quad_variation;
    }
    rec.log_weight = rec.martingale - 0.5 * rec.quad_variation;
    return rec;
}

WeightedEstimate reweighted_expectation(std::span<const double> values,
                                        std::span<const double> weights) {
    if (values.size() != weights.size())
        throw std::invalid_argument("reweighted_expectation: values and weights differ in length");
    if (values.empty()) throw std::invalid_argument("reweighted_expectation: empty input");
    const std::size_t n = values.size();
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0))
            throw std::invalid_argument("reweighted_expectation: weights must be positive");
        prod[i] = values[i] * weights[i];
    }
    WeightedEstimate e;
    double s = 0.0;
    for (double p : prod) s += p;
    e.estimate = s / static_cast<double>(n);
    if (n >= 2) {
        double ss = 0.0;
        for (double p : prod) ss += (p - e.estimate) * (p - e.estimate);
        e.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return e;
}

double effective_sample_size(std::span<const double> weights) {
    if (weights.empty()) throw std::invalid_argument("effective_sample_size: empty input");
    double s = 0.0, s2 = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("effective_sample_size: weights must be positive");
        s += w;
        s2 += w * w;
    }
    return s * s / s2;
}

} // namespace mfe
