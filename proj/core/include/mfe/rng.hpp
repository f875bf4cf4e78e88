#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mfe {

// Role of a random stream within one experiment. Streams for different roles
// (and different replications) are decorrelated by construction, so the
// interacting system, the i.i.d. copies, the law cloud and the calibration run
// never share draws.
enum class StreamRole : std::uint64_t {
    interacting = 1,
    iid_copies = 2,
    law_cloud = 3,
    calibration = 4,
    sampler = 5,
};

namespace detail {

// splitmix64 finalizer; stateless mixing of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (0x9e3779b97f4a7c15ULL + b + (a << 6) + (a >> 2)));
}

} // namespace detail

// Seed of the (seed, replication, role) stream.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication, StreamRole role) {
    return detail::hash_combine(detail::hash_combine(seed, replication),
                                static_cast<std::uint64_t>(role));
}

// Seedable generator with the draw primitives the simulators need. One Rng is
// one logical stream; all draws from it happen in a fixed documented order.
class Rng {
public:
    explicit Rng(std::uint64_t s) : engine_(s) {}
    Rng(std::uint64_t seed, std::uint64_t replication, StreamRole role)
        : engine_(stream_seed(seed, replication, role)) {}

    double normal() { return normal_(engine_); }

    // uniform on (0, 1]
    double uniform() {
        return 1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // standard exponential
    double exponential() { return -std::log(uniform()); }

    std::uint64_t bits() { return engine_(); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace mfe
