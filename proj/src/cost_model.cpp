#include "spten/cost_model.hpp"

#include <stdexcept>
#include <string>

namespace spten {

const char* to_string(Workload w) {
  switch (w) {
    case Workload::tew: return "tew";
    case Workload::ts: return "ts";
    case Workload::ttv: return "ttv";
    case Workload::ttm: return "ttm";
    default: return "mttkrp";
  }
}

namespace {

std::uint64_t require(const std::optional<std::uint64_t>& p, const char* name, Workload w) {
  if (!p)
    throw std::invalid_argument(std::string("estimate: ") + to_string(w) +
                                " requires parameter " + name);
  return *p;
}

}  // namespace

CostEstimate estimate(Workload w, const CostInputs& in) {
  const std::uint64_t nnz = in.nnz;
  CostEstimate c;
  switch (w) {
    case Workload::tew: {
      // three third-order operands resident: 3 * (3 indices + value) * 4 bytes
      c.storage_bytes = 48 * nnz;
      c.work_flops = nnz;
      // read two operands' values+indices, write one output's: 16 bytes each,
      // plus re-read of the output stream under write-allocate
      c.traffic_bytes = 36 * nnz;
      break;
    }
    case Workload::ts: {
      c.storage_bytes = 32 * nnz;
      c.work_flops = nnz;
      c.traffic_bytes = 32 * nnz;
      break;
    }
    case Workload::ttv: {
      const std::uint64_t nfibs = require(in.nfibs, "nfibs", w);
      c.storage_bytes = 16 * nnz + 12 * nfibs;
      c.work_flops = 2 * nnz;
      c.traffic_bytes = 12 * nnz + 20 * nfibs;
      break;
    }
    case Workload::ttm: {
      const std::uint64_t nfibs = require(in.nfibs, "nfibs", w);
      const std::uint64_t I = require(in.I, "I", w);
      const std::uint64_t R = require(in.R, "R", w);
      c.storage_bytes = 16 * nnz + 16 * nfibs * R + 4 * I * R;
      c.work_flops = 2 * nnz * R;
      c.traffic_bytes = 4 * nnz * R + 8 * nnz + 12 * nfibs * R + 8 * nfibs;
      break;
    }
    case Workload::mttkrp: {
      const std::uint64_t I = require(in.I, "I", w);
      const std::uint64_t R = require(in.R, "R", w);
      c.storage_bytes = 16 * nnz + 12 * I * R;
      c.work_flops = 3 * nnz * R;
      c.traffic_bytes = 12 * nnz * R + 16 * nnz;
      break;
    }
  }
  c.arithmetic_intensity = c.traffic_bytes == 0
                               ? 0.0
                               : static_cast<double>(c.work_flops) /
                                     static_cast<double>(c.traffic_bytes);
  return c;
}

}  // namespace spten
