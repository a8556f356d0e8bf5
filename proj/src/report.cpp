#include "spten/report.hpp"

#include <charconv>
#include <cstdio>

#include <json.hpp>

namespace spten {

std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "human") return ReportFormat::human;
  return std::nullopt;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

namespace {

std::string join_dims(const std::vector<Index>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string emit_json(const std::vector<BenchReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const BenchReport& r : reports) {
    nlohmann::ordered_json j;
    j["tensor"] = r.tensor;
    j["dims"] = r.dims;
    j["nnz"] = r.nnz;
    j["kernel"] = r.kernel;
    j["op"] = r.op.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(r.op);
    j["mode"] = r.mode.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(r.mode);
    j["variant"] = r.variant;
    j["strategy"] =
        r.strategy.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(r.strategy);
    j["threads"] = r.threads;
    j["rank"] = r.rank ? nlohmann::ordered_json(r.rank) : nlohmann::ordered_json();
    j["runs"] = r.runs;
    j["times_s"] = r.times_s;
    j["mean_s"] = r.mean_s;
    j["sort_s"] = r.sort_s;
    j["preprocess_s"] = r.preprocess_s;
    j["flops"] = r.flops;
    j["gflops"] = r.gflops;
    if (r.cost) {
      j["cost"] = {{"storage_bytes", r.cost->storage_bytes},
                   {"work_flops", r.cost->work_flops},
                   {"traffic_bytes", r.cost->traffic_bytes},
                   {"arithmetic_intensity", r.cost->arithmetic_intensity}};
    } else {
      j["cost"] = nlohmann::ordered_json();
    }
    j["crosscheck"] =
        r.crosscheck.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(r.crosscheck);
    j["host"] = r.host;
    j["precision"] = r.precision;
    j["max_threads"] = r.max_threads;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string emit_csv(const std::vector<BenchReport>& reports) {
  std::string out =
      "tensor,dims,nnz,kernel,op,mode,variant,strategy,threads,rank,runs,mean_s,sort_s,"
      "preprocess_s,flops,gflops,storage_bytes,work_flops,traffic_bytes,"
      "arithmetic_intensity,crosscheck,host,precision,max_threads,times_s\n";
  for (const BenchReport& r : reports) {
    out += r.tensor + ',' + join_dims(r.dims) + ',' + std::to_string(r.nnz) + ',' + r.kernel +
           ',' + r.op + ',' + r.mode + ',' + r.variant + ',' + r.strategy + ',' +
           std::to_string(r.threads) + ',' + (r.rank ? std::to_string(r.rank) : "") + ',' +
           std::to_string(r.runs) + ',' + fmt_double(r.mean_s) + ',' + fmt_double(r.sort_s) +
           ',' + fmt_double(r.preprocess_s) + ',' + std::to_string(r.flops) + ',' +
           fmt_double(r.gflops) + ',';
    if (r.cost) {
      out += std::to_string(r.cost->storage_bytes) + ',' + std::to_string(r.cost->work_flops) +
             ',' + std::to_string(r.cost->traffic_bytes) + ',' +
             fmt_double(r.cost->arithmetic_intensity) + ',';
    } else {
      out += ",,,,";
    }
    out += r.crosscheck + ',' + r.host + ',' + r.precision + ',' +
           std::to_string(r.max_threads) + ',';
    for (std::size_t i = 0; i < r.times_s.size(); ++i) {
      if (i) out += ';';
      out += fmt_double(r.times_s[i]);
    }
    out += '\n';
  }
  return out;
}

std::string emit_human(const std::vector<BenchReport>& reports) {
  std::string out;
  char buf[512];
  if (!reports.empty()) {
    const BenchReport& r = reports.front();
    std::snprintf(buf, sizeof buf, "tensor %s  dims %s  nnz %zu  precision %s  host %s  max_threads %d\n",
                  r.tensor.c_str(), join_dims(r.dims).c_str(), r.nnz, r.precision.c_str(),
                  r.host.c_str(), r.max_threads);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-8s %-4s %-4s %-4s %-9s %3s %4s %4s %12s %12s %12s %10s %6s\n",
                "kernel", "op", "mode", "var", "strategy", "thr", "rank", "runs", "mean_s",
                "sort_s", "prep_s", "GF/s", "check");
  out += buf;
  for (const BenchReport& r : reports) {
    std::snprintf(buf, sizeof buf,
                  "%-8s %-4s %-4s %-4s %-9s %3d %4s %4d %12.6f %12.6f %12.6f %10.3f %6s\n",
                  r.kernel.c_str(), r.op.empty() ? "-" : r.op.c_str(),
                  r.mode.empty() ? "-" : r.mode.c_str(), r.variant.c_str(),
                  r.strategy.empty() ? "-" : r.strategy.c_str(), r.threads,
                  r.rank ? std::to_string(r.rank).c_str() : "-", r.runs, r.mean_s, r.sort_s,
                  r.preprocess_s, r.gflops, r.crosscheck.empty() ? "-" : r.crosscheck.c_str());
    out += buf;
  }
  return out;
}

}  // namespace

std::string emit_report(const std::vector<BenchReport>& reports, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::json: return emit_json(reports);
    case ReportFormat::csv: return emit_csv(reports);
    default: return emit_human(reports);
  }
}

}  // namespace spten
