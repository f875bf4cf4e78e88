#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfe/array2d.hpp"
#include "mfe/model.hpp"
#include "mfe/rng.hpp"

namespace mfe {

// Uniform grid 0 = t_0 < ... < t_steps = T.
struct TimeGrid {
    double T = 1.0;
    std::int64_t steps = 1;

    double dt() const { return T / static_cast<double>(steps); }
    double time(std::int64_t k) const {
        return T * static_cast<double>(k) / static_cast<double>(steps);
    }
    bool operator==(const TimeGrid&) const = default;
};

struct SimConfig {
    std::int64_t paths = 1;  // ensemble size (N particles / copies)
    TimeGrid grid;
    std::uint64_t seed = 0;
    std::int64_t replication = 0;
    StreamRole role = StreamRole::interacting;
    bool record_increments = false;
};

// One simulated ensemble on the grid. values is paths x (steps+1); increments,
// when recorded, is paths x steps and holds the Brownian increments reused by
// the change-of-measure weights.
struct TrajectoryBatch {
    TimeGrid grid;
    Array2D values;
    Array2D increments;

    std::size_t paths() const { return values.rows(); }
    PathEnsembleView view_at(std::int64_t k) const {
        return {values.data().data(), values.rows(), values.cols(),
                static_cast<std::size_t>(k) + 1};
    }
    std::vector<double> endpoints() const;
};

// Simulated stand-in for the limit law: M paths refined by fixed-point
// iteration, each generation simulated against the frozen previous one.
struct LawCloud {
    TimeGrid grid;
    Array2D paths;
    int generation = 0;
};

// Per-step snapshot of a frozen ensemble that makes repeated mean-field
// queries cheap (running mean or sorted positions, depending on the kernel).
struct MeanFieldCache {
    MeanFieldStructure structure = MeanFieldStructure::generic;
    double current_mean = 0.0;
    std::vector<double> sorted_current;
};

MeanFieldCache make_mean_field_cache(const ModelSpec& model, const PathEnsembleView& ensemble);

// r = (1/M) sum_j g(t, x, Y_j) against `ensemble`; `cache` must have been
// built from the same ensemble view.
double mean_field_query(const ModelSpec& model, double t, PathView x,
                        const PathEnsembleView& ensemble, const MeanFieldCache& cache);

// Mean-field value of member i of a batch against the batch itself at grid
// index k (the empirical-measure evaluation).
double empirical_mean_field(std::size_t i, std::int64_t k, const TrajectoryBatch& batch,
                            const ModelSpec& model);

// A frozen one-particle law: either the model's closed form or a simulated
// cloud with per-step caches.
class FrozenLaw {
public:
    static FrozenLaw analytic();
    static FrozenLaw from_cloud(const ModelSpec& model, LawCloud cloud);

    bool is_analytic() const { return analytic_; }
    const LawCloud& cloud() const;
    const TimeGrid* grid() const { return analytic_ ? nullptr : &cloud_.grid; }

    double value(const ModelSpec& model, std::int64_t k, double t, PathView x) const;
    void bulk(const ModelSpec& model, std::int64_t k, double t,
              const PathEnsembleView& queries, std::span<double> out) const;

private:
    bool analytic_ = true;
    LawCloud cloud_;
    std::vector<MeanFieldCache> caches_;
};

// One Euler step of the whole interacting ensemble: fills column k+1 from
// column k, with the interaction evaluated against the time-t_k ensemble.
void step_interacting(TrajectoryBatch& batch, std::int64_t k, const ModelSpec& model, Rng& rng);

// Explicit Euler simulation of the N-particle interacting system.
TrajectoryBatch simulate_interacting(const SimConfig& cfg, const ModelSpec& model);

// Independent copies of the one-particle equation driven by the frozen law.
TrajectoryBatch simulate_iid_copies(const SimConfig& cfg, const ModelSpec& model,
                                    const FrozenLaw& law);

struct CloudConfig {
    std::int64_t paths = 100000;
    TimeGrid grid;
    std::uint64_t seed = 0;
    int picard_iters = 3;
    double mean_tolerance = 0.05;  // gate on successive time-T means
};

// Fixed-point construction of the law cloud. Generation 0 runs with the
// interaction switched off; generation j+1 is simulated against frozen
// generation j. Throws when the last two time-T means differ by more than
// the tolerance.
LawCloud build_law_cloud(const CloudConfig& cfg, const ModelSpec& model);

// Flat binary dump of the value matrix: int64 paths, int64 steps, double T
// (all little-endian 64-bit), then the paths x (steps+1) doubles row-major.
void write_paths_binary(const TrajectoryBatch& batch, const std::string& path);
TrajectoryBatch read_paths_binary(const std::string& path);

} // namespace mfe
