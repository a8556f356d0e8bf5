#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spten/cost_model.hpp"
#include "spten/tensor.hpp"

namespace spten {

enum class ReportFormat { json, csv, human };

std::optional<ReportFormat> parse_report_format(std::string_view s);

// One benchmarked configuration: a kernel x mode x variant row plus derived
// metrics and environment. mode is a mode number, "all" for the row holding
// position-wise sums over all modes, or empty for kernels without a mode.
struct BenchReport {
  std::string tensor;
  std::vector<Index> dims;
  std::size_t nnz = 0;
  std::string kernel;
  std::string op;        // tew/tew-eq/ts only
  std::string mode;
  std::string variant;   // "seq" or "par"
  std::string strategy;  // par mttkrp only
  int threads = 1;
  std::size_t rank = 0;  // ttm/mttkrp only
  int runs = 0;
  std::vector<double> times_s;  // one entry per timed run
  double mean_s = 0.0;          // arithmetic mean of times_s
  double sort_s = 0.0;          // lexicographic sort (shared across variants)
  double preprocess_s = 0.0;    // fiber-index construction (shared across variants)
  std::uint64_t flops = 0;      // measured flops of one run
  double gflops = 0.0;          // flops / mean_s / 1e9
  std::optional<CostEstimate> cost;  // third-order inputs only
  std::string crosscheck;  // "pass"/"fail" when both variants ran, else empty
  std::string host;
  std::string precision;  // "f32"/"f64"
  int max_threads = 1;
};

double mean(const std::vector<double>& xs);

// json: an array of objects, stable field order. csv: header plus one line per
// report (dims joined with 'x', times_s joined with ';', absent fields empty).
// human: fixed-width table with one header block.
std::string emit_report(const std::vector<BenchReport>& reports, ReportFormat fmt);

}  // namespace spten
