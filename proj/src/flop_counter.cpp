#include "spten/flop_counter.hpp"

#include <atomic>

namespace spten::flops {

namespace {
std::atomic<std::uint64_t> g_flops{0};
}

void reset() noexcept { g_flops.store(0, std::memory_order_relaxed); }

std::uint64_t count() noexcept { return g_flops.load(std::memory_order_relaxed); }

void record(std::uint64_t n) noexcept { g_flops.fetch_add(n, std::memory_order_relaxed); }

}  // namespace spten::flops
