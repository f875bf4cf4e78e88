#include "mfe/sde.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mfe {

namespace {

void validate(const SimConfig& cfg) {
    if (cfg.paths < 1) throw std::invalid_argument("SimConfig: paths must be >= 1");
    if (cfg.grid.steps < 1) throw std::invalid_argument("SimConfig: steps must be >= 1");
    if (!(cfg.grid.T > 0.0)) throw std::invalid_argument("SimConfig: T must be positive");
}

TrajectoryBatch make_batch(const SimConfig& cfg) {
    TrajectoryBatch b;
    b.grid = cfg.grid;
    b.values = Array2D(static_cast<std::size_t>(cfg.paths),
                       static_cast<std::size_t>(cfg.grid.steps) + 1);
    if (cfg.record_increments)
        b.increments = Array2D(static_cast<std::size_t>(cfg.paths),
                               static_cast<std::size_t>(cfg.grid.steps));
    return b;
}

[[noreturn]] void throw_non_finite(std::size_t particle, std::int64_t step, double value) {
    throw std::runtime_error("non-finite particle state: particle " + std::to_string(particle) +
                             " at step " + std::to_string(step) + " (value " +
                             std::to_string(value) + ")");
}

// Advance column k -> k+1 given the interaction values r and increments dw.
void advance(TrajectoryBatch& b, std::int64_t k, const ModelSpec& model,
             std::span<const double> r, std::span<const double> dw) {
    const double dt = b.grid.dt();
    const double t = b.grid.time(k);
    const std::size_t n = b.paths();
    for (std::size_t i = 0; i < n; ++i) {
        const PathView x{b.values.row(i).data(), static_cast<std::size_t>(k) + 1};
        const double a = model.diffusion(t, x);
        const double bv = model.drift(t, x, r[i]);
        const double cv = model.free_drift(t, x);
        const double next = x.back() + a * (bv * dt + dw[i]) + cv * dt;
        if (!std::isfinite(next)) throw_non_finite(i, k + 1, next);
        b.values(i, static_cast<std::size_t>(k) + 1) = next;
    }
}

void draw_initials(TrajectoryBatch& b, const ModelSpec& model, Rng& rng) {
    const std::size_t n = b.paths();
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = model.initial_law(rng);
        if (!std::isfinite(x0)) throw_non_finite(i, 0, x0);
        b.values(i, 0) = x0;
    }
}

void draw_increments(TrajectoryBatch& b, std::int64_t k, double sqrt_dt, Rng& rng,
                     std::span<double> dw) {
    const std::size_t n = b.paths();
    for (std::size_t i = 0; i < n; ++i) {
        dw[i] = sqrt_dt * rng.normal();
        if (!b.increments.empty()) b.increments(i, static_cast<std::size_t>(k)) = dw[i];
    }
}

// Interaction values of every member of `queries` against `ensemble`.
void bulk_mean_field(const ModelSpec& model, double t, const PathEnsembleView& queries,
                     const PathEnsembleView& ensemble, const MeanFieldCache& cache,
                     std::span<double> out) {
    for (std::size_t i = 0; i < queries.size(); ++i)
        out[i] = mean_field_query(model, t, queries.prefix(i), ensemble, cache);
}

} // namespace

std::vector<double> TrajectoryBatch::endpoints() const {
    std::vector<double> out(paths());
    const std::size_t last = values.cols() - 1;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = values(i, last);
    return out;
}

MeanFieldCache make_mean_field_cache(const ModelSpec& model, const PathEnsembleView& ensemble) {
    MeanFieldCache cache;
    cache.structure = model.structure;
    switch (model.structure) {
        case MeanFieldStructure::current_mean: {
            double s = 0.0;
            for (std::size_t j = 0; j < ensemble.size(); ++j) s += ensemble.current(j);
            cache.current_mean = s / static_cast<double>(ensemble.size());
            break;
        }
        case MeanFieldStructure::empirical_cdf: {
            cache.sorted_current.resize(ensemble.size());
            for (std::size_t j = 0; j < ensemble.size(); ++j)
                cache.sorted_current[j] = ensemble.current(j);
            std::sort(cache.sorted_current.begin(), cache.sorted_current.end());
            break;
        }
        case MeanFieldStructure::generic:
        case MeanFieldStructure::unused:
            break;
    }
    return cache;
}

double mean_field_query(const ModelSpec& model, double t, PathView x,
                        const PathEnsembleView& ensemble, const MeanFieldCache& cache) {
    switch (cache.structure) {
        case MeanFieldStructure::unused:
            return 0.0;
        case MeanFieldStructure::current_mean:
            return cache.current_mean;
        case MeanFieldStructure::empirical_cdf: {
            const auto& v = cache.sorted_current;
            const auto it = std::upper_bound(v.begin(), v.end(), x.back());
            return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
        }
        case MeanFieldStructure::generic:
            break;
    }
    if (!model.kernel) throw std::invalid_argument("mean_field_query: model has no kernel");
    double s = 0.0;
    for (std::size_t j = 0; j < ensemble.size(); ++j)
        s += model.kernel(t, x, ensemble.prefix(j));
    return s / static_cast<double>(ensemble.size());
}

double empirical_mean_field(std::size_t i, std::int64_t k, const TrajectoryBatch& batch,
                            const ModelSpec& model) {
    if (i >= batch.paths()) throw std::invalid_argument("empirical_mean_field: particle index out of range");
    if (k < 0 || k >= static_cast<std::int64_t>(batch.values.cols()))
        throw std::invalid_argument("empirical_mean_field: grid index out of range");
    const auto view = batch.view_at(k);
    const auto cache = make_mean_field_cache(model, view);
    return mean_field_query(model, batch.grid.time(k), view.prefix(i), view, cache);
}

FrozenLaw FrozenLaw::analytic() {
    FrozenLaw law;
    law.analytic_ = true;
    return law;
}

FrozenLaw FrozenLaw::from_cloud(const ModelSpec& model, LawCloud cloud) {
    if (cloud.paths.rows() < 1) throw std::invalid_argument("FrozenLaw: empty cloud");
    FrozenLaw law;
    law.analytic_ = false;
    law.cloud_ = std::move(cloud);
    const std::size_t cols = law.cloud_.paths.cols();
    law.caches_.reserve(cols);
    for (std::size_t k = 0; k < cols; ++k) {
        const PathEnsembleView view{law.cloud_.paths.data().data(), law.cloud_.paths.rows(),
                                    law.cloud_.paths.cols(), k + 1};
        law.caches_.push_back(make_mean_field_cache(model, view));
    }
    return law;
}

const LawCloud& FrozenLaw::cloud() const {
    if (analytic_) throw std::logic_error("FrozenLaw: analytic law has no cloud");
    return cloud_;
}

double FrozenLaw::value(const ModelSpec& model, std::int64_t k, double t, PathView x) const {
    if (analytic_) {
        if (!model.closed_form)
            throw std::invalid_argument("FrozenLaw: model has no closed form");
        return model.closed_form->mean_field(t, x);
    }
    const PathEnsembleView view{cloud_.paths.data().data(), cloud_.paths.rows(),
                                cloud_.paths.cols(), static_cast<std::size_t>(k) + 1};
    return mean_field_query(model, t, x, view, caches_[static_cast<std::size_t>(k)]);
}

void FrozenLaw::bulk(const ModelSpec& model, std::int64_t k, double t,
                     const PathEnsembleView& queries, std::span<double> out) const {
    if (analytic_) {
        if (!model.closed_form)
            throw std::invalid_argument("FrozenLaw: model has no closed form");
        for (std::size_t i = 0; i < queries.size(); ++i)
            out[i] = model.closed_form->mean_field(t, queries.prefix(i));
        return;
    }
    const PathEnsembleView view{cloud_.paths.data().data(), cloud_.paths.rows(),
                                cloud_.paths.cols(), static_cast<std::size_t>(k) + 1};
    bulk_mean_field(model, t, queries, view, caches_[static_cast<std::size_t>(k)], out);
}

void step_interacting(TrajectoryBatch& batch, std::int64_t k, const ModelSpec& model, Rng& rng) {
    if (k < 0 || k >= batch.grid.steps)
        throw std::invalid_argument("step_interacting: grid index out of range");
    const std::size_t n = batch.paths();
    std::vector<double> r(n), dw(n);
    const auto view = batch.view_at(k);
    const auto cache = make_mean_field_cache(model, view);
    bulk_mean_field(model, batch.grid.time(k), view, view, cache, r);
    draw_increments(batch, k, std::sqrt(batch.grid.dt()), rng, dw);
    advance(batch, k, model, r, dw);
}

TrajectoryBatch simulate_interacting(const SimConfig& cfg, const ModelSpec& model) {
    validate(cfg);
    TrajectoryBatch b = make_batch(cfg);
    Rng rng(cfg.seed, static_cast<std::uint64_t>(cfg.replication), cfg.role);
    draw_initials(b, model, rng);
    for (std::int64_t k = 0; k < cfg.grid.steps; ++k) step_interacting(b, k, model, rng);
    return b;
}

TrajectoryBatch simulate_iid_copies(const SimConfig& cfg, const ModelSpec& model,
                                    const FrozenLaw& law) {
    validate(cfg);
    if (const TimeGrid* g = law.grid(); g && !(*g == cfg.grid))
        throw std::invalid_argument("simulate_iid_copies: law grid does not match the simulation grid");
    if (law.is_analytic() && !model.closed_form)
        throw std::invalid_argument("simulate_iid_copies: analytic law requires a closed-form model");

    TrajectoryBatch b = make_batch(cfg);
    Rng rng(cfg.seed, static_cast<std::uint64_t>(cfg.replication), cfg.role);
    draw_initials(b, model, rng);
    const double sqrt_dt = std::sqrt(cfg.grid.dt());
    std::vector<double> r(b.paths()), dw(b.paths());
    for (std::int64_t k = 0; k < cfg.grid.steps; ++k) {
        law.bulk(model, k, cfg.grid.time(k), b.view_at(k), r);
        draw_increments(b, k, sqrt_dt, rng, dw);
        advance(b, k, model, r, dw);
    }
    return b;
}

LawCloud build_law_cloud(const CloudConfig& cfg, const ModelSpec& model) {
    if (cfg.paths < 2) throw std::invalid_argument("build_law_cloud: need at least 2 paths");
    if (cfg.picard_iters < 1) throw std::invalid_argument("build_law_cloud: picard_iters must be >= 1");

    // generation 0: interaction switched off, nu_0-driven baseline dynamics
    ModelSpec base = model;
    base.drift = [](double, PathView, double) { return 0.0; };
    base.kernel = {};
    base.structure = MeanFieldStructure::unused;
    base.closed_form.reset();

    SimConfig sim;
    sim.paths = cfg.paths;
    sim.grid = cfg.grid;
    sim.seed = cfg.seed;
    sim.role = StreamRole::law_cloud;
    sim.replication = 0;

    const auto endpoint_mean = [](const Array2D& values) {
        double s = 0.0;
        const std::size_t last = values.cols() - 1;
        for (std::size_t i = 0; i < values.rows(); ++i) s += values(i, last);
        return s / static_cast<double>(values.rows());
    };

    TrajectoryBatch gen = simulate_interacting(sim, base);
    LawCloud cloud{cfg.grid, std::move(gen.values), 0};
    double prev_mean = endpoint_mean(cloud.paths);

    double last_mean = prev_mean;
    for (int j = 1; j <= cfg.picard_iters; ++j) {
        FrozenLaw frozen = FrozenLaw::from_cloud(model, std::move(cloud));
        sim.replication = j;
        TrajectoryBatch next = simulate_iid_copies(sim, model, frozen);
        cloud = LawCloud{cfg.grid, std::move(next.values), j};
        prev_mean = last_mean;
        last_mean = endpoint_mean(cloud.paths);
    }
    if (std::abs(last_mean - prev_mean) > cfg.mean_tolerance)
        throw std::runtime_error("build_law_cloud: fixed-point iteration did not settle (time-T means " +
                                 std::to_string(prev_mean) + " -> " + std::to_string(last_mean) + ")");
    return cloud;
}

namespace {

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

} // namespace

void write_paths_binary(const TrajectoryBatch& batch, const std::string& path) {
    std::string buf;
    buf.reserve(24 + batch.values.data().size() * 8);
    put_u64(buf, static_cast<std::uint64_t>(batch.paths()));
    put_u64(buf, static_cast<std::uint64_t>(batch.grid.steps));
    put_u64(buf, std::bit_cast<std::uint64_t>(batch.grid.T));
    for (double x : batch.values.data()) put_u64(buf, std::bit_cast<std::uint64_t>(x));
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("write_paths_binary: cannot open " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("write_paths_binary: write failed for " + path);
}

TrajectoryBatch read_paths_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_paths_binary: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < 24) throw std::runtime_error("read_paths_binary: truncated header in " + path);
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    const std::uint64_t paths = get_u64(p);
    const std::uint64_t steps = get_u64(p + 8);
    const double T = std::bit_cast<double>(get_u64(p + 16));
    const std::uint64_t expected = paths * (steps + 1);
    if (buf.size() != 24 + expected * 8)
        throw std::runtime_error("read_paths_binary: size mismatch in " + path);
    TrajectoryBatch b;
    b.grid = TimeGrid{T, static_cast<std::int64_t>(steps)};
    b.values = Array2D(paths, steps + 1);
    for (std::uint64_t i = 0; i < expected; ++i)
        b.values.data()[i] = std::bit_cast<double>(get_u64(p + 24 + i * 8));
    return b;
}

} // namespace mfe
