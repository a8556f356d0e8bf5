#pragma once

#include <cstdint>
#include <optional>

// Analytical per-workload cost model for third-order COO kernels with 4-byte
// values and 4-byte indices: total bytes stored, flops executed, and bytes
// moved assuming every stream misses cache (compulsory traffic), plus their
// quotient. Traffic counts reads of operand streams and write+allocate of
// outputs; dense operands (vector/matrix/factors) are assumed cache-resident,
// which is why intensities stay below 1 flop/byte for every workload.
namespace spten {

enum class Workload { tew, ts, ttv, ttm, mttkrp };

const char* to_string(Workload w);

struct CostEstimate {
  std::uint64_t storage_bytes = 0;
  std::uint64_t work_flops = 0;
  std::uint64_t traffic_bytes = 0;
  double arithmetic_intensity = 0.0;  // work_flops / traffic_bytes
};

// Model parameters. nnz is always required; ttv/ttm need nfibs, ttm/mttkrp need
// the active-mode extent I and the rank R.
struct CostInputs {
  std::uint64_t nnz = 0;
  std::optional<std::uint64_t> nfibs;
  std::optional<std::uint64_t> I;
  std::optional<std::uint64_t> R;
};

// Throws std::invalid_argument naming the first missing parameter.
CostEstimate estimate(Workload w, const CostInputs& in);

}  // namespace spten
