#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spten/bench.hpp"
#include "spten/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Sparse tensor kernel benchmark: COO kernels (tew-eq, tew, ts, ttv, ttm, mttkrp) in "
      "sequential and OpenMP-parallel variants with per-mode timing, measured flops, "
      "analytical cost estimates, and a seq-vs-par cross-check."};

  spten::BenchConfig cfg;
  std::string format = "human";
  std::string out_path;

  app.add_option("--kernel", cfg.kernel, "Kernel family: tew-eq|tew|ts|ttv|ttm|mttkrp")
      ->required();
  app.add_option("--op", cfg.op,
                 "Elementwise/scalar op: add|sub|mul|div (tew-eq), add|sub|mul (tew), "
                 "add|mul (ts)");
  app.add_option("--input", cfg.input, "Input tensor (.tns)");
  app.add_option("--input2", cfg.input2, "Second operand tensor (.tns, tew kernels)");
  app.add_option("--synthetic", cfg.synthetic,
                 "Generate input: DIMS:NNZ:SEED[:uniform|skewed[:FRACTION]], e.g. "
                 "64x64x64:100000:42");
  app.add_option("--manifest", cfg.manifest,
                 "Dataset manifest pinning dimensions of --input by file stem");
  app.add_option("--mode", cfg.mode, "Mode to contract/expand, or 'all' (ttv/ttm/mttkrp)");
  app.add_option("--rank", cfg.rank, "Columns of the dense factor(s) (ttm/mttkrp)");
  app.add_option("--scalar", cfg.scalar, "Scalar operand (ts)");
  app.add_option("--threads", cfg.threads, "Thread count for par runs; 0 = OpenMP default");
  app.add_option("--runs", cfg.runs, "Timed repetitions per configuration");
  app.add_option("--variant", cfg.variant, "seq|par|both");
  app.add_option("--strategy", cfg.strategy, "par mttkrp reduction: privatize|atomic");
  app.add_option("--precision", cfg.precision, "Value type: f32|f64");
  app.add_option("--format", format, "Report format: json|csv|human");
  app.add_option("--out", out_path, "Write the report to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto fmt = spten::parse_report_format(format);
    if (!fmt) {
      std::cerr << "bench: unknown format '" << format << "' (expected json|csv|human)\n";
      return 1;
    }
    const std::vector<spten::BenchReport> reports = spten::run_bench(cfg);
    const std::string text = spten::emit_report(reports, *fmt);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) {
        std::cerr << "bench: cannot open " << out_path << "\n";
        return 1;
      }
      f << text;
      if (!f) {
        std::cerr << "bench: write error on " << out_path << "\n";
        return 1;
      }
    }
    for (const spten::BenchReport& r : reports) {
      if (r.crosscheck == "fail") {
        std::cerr << "bench: sequential/parallel cross-check FAILED (kernel " << r.kernel
                  << ", mode " << (r.mode.empty() ? "-" : r.mode) << ")\n";
        return 2;
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 1;
  }
}
