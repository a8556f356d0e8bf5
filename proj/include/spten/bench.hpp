#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spten/report.hpp"

namespace spten {

// A benchmark request. Exactly one of input / synthetic must be set. The dense
// operands a kernel needs (vector, matrix, factor matrices) are generated
// deterministically from the input's seed.
struct BenchConfig {
  std::string kernel;                  // tew-eq|tew|ts|ttv|ttm|mttkrp
  std::string op = "add";              // add|sub|mul|div (tew-eq), add|sub|mul (tew), add|mul (ts)
  std::string input;                   // .tns path
  std::string input2;                  // second operand path (tew kernels)
  std::string synthetic;               // DIMS:NNZ:SEED[:uniform|skewed[:FRACTION]]
  std::string manifest;                // manifest pinning dims of --input
  std::string mode = "all";            // mode number or "all"
  std::size_t rank = 16;               // ttm/mttkrp
  double scalar = 2.0;                 // ts
  int threads = 0;                     // 0 -> OpenMP default
  int runs = 5;
  std::string variant = "both";        // seq|par|both
  std::string strategy = "privatize";  // privatize|atomic
  std::string precision = "f32";       // f32|f64
};

// Runs the configured benchmark: per requested mode, a timed row per variant
// (after one untimed warmup run that also measures flops and feeds the
// seq-vs-par cross-check), plus a position-wise-summed "all" row per variant
// when mode == "all". Sorting and fiber-index construction are timed separately
// and shared across the variants of a mode. Throws std::invalid_argument /
// std::runtime_error on configuration or input errors.
std::vector<BenchReport> run_bench(const BenchConfig& cfg);

}  // namespace spten
