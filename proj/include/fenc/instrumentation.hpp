#pragma once

// Process-wide counter of backward passes. Calibration and one-shot
// adaptation are gradient-free by contract; tests assert the counter stays
// put across those paths.

#include <atomic>
#include <cstdint>

namespace fenc::instrumentation {

inline std::atomic<std::uint64_t>& backward_counter() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}

inline void count_backward_pass() {
    backward_counter().fetch_add(1, std::memory_order_relaxed);
}

inline std::uint64_t backward_passes() {
    return backward_counter().load(std::memory_order_relaxed);
}

}  // namespace fenc::instrumentation
