#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfe/model.hpp"
#include "mfe/sde.hpp"

namespace mfe {

// Per-particle pieces of the change-of-measure exponent: the discrete
// stochastic integral sum_k dB_k dW_k and its bracket sum_k dB_k^2 dt.
struct ParticleContribution {
    double martingale = 0.0;
    double quad_variation = 0.0;
};

// Radon-Nikodym exponent tying the independent copies to the interacting
// law: log Z = M - bracket/2 with M = sum_i sum_k dB dW over the very
// increments that drove the batch.
struct WeightRecord {
    double log_weight = 0.0;
    double martingale = 0.0;
    double quad_variation = 0.0;
    std::vector<ParticleContribution> per_particle;

    double weight() const;
};

// Drift gap of copy i at grid index k: the interaction drift evaluated
// against the batch's own empirical measure minus against the frozen law.
double delta_b(std::size_t i, std::int64_t k, const TrajectoryBatch& batch,
               const FrozenLaw& law, const ModelSpec& model);

// Full weight for one batch of independent copies. Requires the Brownian
// increments recorded at simulation time; left-endpoint (Ito) sums, with the
// reductions over particles and steps in fixed index order.
WeightRecord girsanov_weight(const TrajectoryBatch& batch, const FrozenLaw& law,
                             const ModelSpec& model);

struct WeightedEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// mean(phi_r * Z_r) with its Monte Carlo standard error; values and weights
// are paired per replication and weights must be positive.
WeightedEstimate reweighted_expectation(std::span<const double> values,
                                        std::span<const double> weights);

// (sum w)^2 / sum w^2 — the equivalent unweighted sample size.
double effective_sample_size(std::span<const double> weights);

} // namespace mfe
