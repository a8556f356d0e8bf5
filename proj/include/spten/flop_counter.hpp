#pragma once

#include <cstdint>

// Global floating-point operation counter. Kernels accumulate locally and call
// record() once per call (or once per thread per parallel region), so the
// counter costs one relaxed atomic add per kernel invocation.
namespace spten::flops {

void reset() noexcept;
std::uint64_t count() noexcept;
void record(std::uint64_t n) noexcept;

}  // namespace spten::flops
