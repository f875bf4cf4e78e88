#include "mfe/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace mfe {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MFE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw std::runtime_error("MFE_WORKERS must be an integer in [1, 4096]");
        return static_cast<int>(v);
    }
    return 1;
}

void parallel_for(std::int64_t count, int workers,
                  const std::function<void(std::int64_t)>& body) {
    if (count <= 0) return;
    if (workers < 1) throw std::invalid_argument("parallel_for: workers must be >= 1");
    if (workers == 1 || count == 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::int64_t error_index = -1;
    std::exception_ptr error;

    auto drain = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (error_index < 0 || i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::int64_t>(workers, count));
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int w = 0; w < spawn; ++w) pool.emplace_back(drain);
    for (auto& t : pool) t.join();

    if (error) std::rethrow_exception(error);
}

} // namespace mfe
