#include "spten/bench.hpp"

#include <omp.h>
#include <unistd.h>

#include <charconv>
#include <chrono>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "spten/flop_counter.hpp"
#include "spten/io.hpp"
#include "spten/kernels_par.hpp"
#include "spten/kernels_seq.hpp"

namespace spten {

namespace {

enum class KernelKind { tew_eq, tew, ts, ttv, ttm, mttkrp };

KernelKind parse_kernel(const std::string& s) {
  if (s == "tew-eq") return KernelKind::tew_eq;
  if (s == "tew") return KernelKind::tew;
  if (s == "ts") return KernelKind::ts;
  if (s == "ttv") return KernelKind::ttv;
  if (s == "ttm") return KernelKind::ttm;
  if (s == "mttkrp") return KernelKind::mttkrp;
  throw std::invalid_argument("unknown kernel '" + s +
                              "' (expected tew-eq|tew|ts|ttv|ttm|mttkrp)");
}

template <typename F>
double time_call(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string host_tag() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

struct SynthSpec {
  std::vector<Index> dims;
  std::size_t nnz = 0;
  std::uint64_t seed = 0;
  SyntheticDist dist = SyntheticDist::uniform;
  double frac = 0.0;
};

std::uint64_t parse_u64(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument(std::string("invalid ") + what + " '" + std::string(s) + "'");
  return v;
}

// DIMS:NNZ:SEED[:uniform|skewed[:FRACTION]] with DIMS like 64x64x64
SynthSpec parse_synth(const std::string& s) {
  std::vector<std::string_view> parts;
  std::string_view sv(s);
  std::size_t pos = 0;
  while (true) {
    const std::size_t c = sv.find(':', pos);
    parts.push_back(sv.substr(pos, c - pos));
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  if (parts.size() < 3 || parts.size() > 5)
    throw std::invalid_argument("invalid synthetic spec '" + s +
                                "' (expected DIMS:NNZ:SEED[:uniform|skewed[:FRACTION]])");
  SynthSpec sp;
  std::string_view dims = parts[0];
  std::size_t dpos = 0;
  while (true) {
    const std::size_t x = dims.find('x', dpos);
    const std::uint64_t d = parse_u64(dims.substr(dpos, x - dpos), "dimension");
    if (d == 0 || d > std::numeric_limits<Index>::max())
      throw std::invalid_argument("synthetic dimension out of range in '" + s + "'");
    sp.dims.push_back(static_cast<Index>(d));
    if (x == std::string_view::npos) break;
    dpos = x + 1;
  }
  sp.nnz = parse_u64(parts[1], "nnz");
  sp.seed = parse_u64(parts[2], "seed");
  if (parts.size() >= 4) {
    if (parts[3] == "uniform") sp.dist = SyntheticDist::uniform;
    else if (parts[3] == "skewed") sp.dist = SyntheticDist::slice_skewed;
    else
      throw std::invalid_argument("unknown synthetic distribution '" + std::string(parts[3]) +
                                  "'");
    if (parts.size() == 5) {
      const std::string frac(parts[4]);
      double f = 0.0;
      const auto [p, ec] = std::from_chars(frac.data(), frac.data() + frac.size(), f);
      if (ec != std::errc{} || p != frac.data() + frac.size())
        throw std::invalid_argument("invalid skew fraction '" + frac + "'");
      sp.frac = f;
    } else if (sp.dist == SyntheticDist::slice_skewed) {
      sp.frac = 0.9;
    }
  }
  return sp;
}

template <typename T>
DenseVector<T> random_vector(std::size_t n, std::mt19937_64& rng) {
  DenseVector<T> v(n);
  std::uniform_real_distribution<double> d(0.5, 1.5);
  for (auto& x : v.data) x = static_cast<T>(d(rng));
  return v;
}

template <typename T>
DenseMatrix<T> random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  DenseMatrix<T> m(rows, cols);
  std::uniform_real_distribution<double> d(0.5, 1.5);
  for (auto& x : m.data) x = static_cast<T>(d(rng));
  return m;
}

template <typename T>
struct Inputs {
  SparseTensorCOO<T> x, y;
  std::string name;
  std::uint64_t seed = 0x5eed;
};

template <typename T>
Inputs<T> load_inputs(const BenchConfig& cfg, KernelKind kind) {
  Inputs<T> in;
  const bool needs_y = kind == KernelKind::tew_eq || kind == KernelKind::tew;
  const bool have_file = !cfg.input.empty();
  const bool have_synth = !cfg.synthetic.empty();
  if (have_file == have_synth)
    throw std::invalid_argument("exactly one of --input and --synthetic is required");
  if (!needs_y && !cfg.input2.empty())
    throw std::invalid_argument("--input2 is only used by the tew kernels");

  if (have_synth) {
    const SynthSpec sp = parse_synth(cfg.synthetic);
    in.seed = sp.seed;
    in.x = gen_synthetic<T>(sp.dims, sp.nnz, sp.seed, sp.dist, sp.frac);
    in.name = "synth";
    for (std::size_t i = 0; i < sp.dims.size(); ++i)
      in.name += (i ? "x" : "-") + std::to_string(sp.dims[i]);
    if (needs_y) {
      if (kind == KernelKind::tew_eq) {
        // identical pattern, fresh nonzero values
        in.y = in.x;
        std::mt19937_64 rng(sp.seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_real_distribution<double> d(1.0, 2.0);
        for (auto& v : in.y.values) v = static_cast<T>(d(rng));
      } else {
        in.y = gen_synthetic<T>(sp.dims, sp.nnz, sp.seed + 1, sp.dist, sp.frac);
      }
    }
    return in;
  }

  std::vector<ManifestEntry> manifest;
  if (!cfg.manifest.empty()) manifest = read_manifest(cfg.manifest);
  auto dims_for = [&](const std::string& path,
                      bool required) -> std::optional<std::vector<Index>> {
    if (manifest.empty()) return std::nullopt;
    const std::string stem = std::filesystem::path(path).stem().string();
    const ManifestEntry* e = find_entry(manifest, stem);
    if (!e) {
      if (required)
        throw std::runtime_error("manifest " + cfg.manifest + " has no record for '" + stem +
                                 "'");
      return std::nullopt;
    }
    return e->dims;
  };

  in.name = std::filesystem::path(cfg.input).stem().string();
  in.x = read_tns<T>(cfg.input, dims_for(cfg.input, true));
  if (!in.x.coalesced) in.x = coalesce(in.x);
  if (needs_y) {
    if (cfg.input2.empty())
      throw std::invalid_argument(cfg.kernel + " needs a second operand: --input2");
    in.y = read_tns<T>(cfg.input2, dims_for(cfg.input2, false));
    if (!in.y.coalesced) in.y = coalesce(in.y);
  }
  return in;
}

struct VariantResult {
  std::vector<double> times;
  std::uint64_t flops = 0;
};

// One untimed warmup run (measuring flops), then `runs` timed runs.
template <typename F>
VariantResult bench_variant(F&& call, int runs) {
  VariantResult r;
  flops::reset();
  call();
  r.flops = flops::count();
  r.times.reserve(runs);
  for (int i = 0; i < runs; ++i) r.times.push_back(time_call(call));
  return r;
}

BenchReport finish_row(BenchReport row, const std::string& mode, const std::string& variant,
                       int threads, const std::string& strategy, VariantResult vr,
                       double sort_s, double prep_s, std::optional<CostEstimate> cost) {
  row.mode = mode;
  row.variant = variant;
  row.threads = threads;
  row.strategy = strategy;
  row.times_s = std::move(vr.times);
  row.mean_s = mean(row.times_s);
  row.sort_s = sort_s;
  row.preprocess_s = prep_s;
  row.flops = vr.flops;
  row.gflops = row.mean_s > 0.0 ? static_cast<double>(vr.flops) / row.mean_s / 1e9 : 0.0;
  row.cost = std::move(cost);
  return row;
}

void set_crosscheck(std::vector<BenchReport>& rows, bool ok) {
  rows[rows.size() - 1].crosscheck = ok ? "pass" : "fail";
  rows[rows.size() - 2].crosscheck = ok ? "pass" : "fail";
}

template <typename T>
std::vector<BenchReport> run_bench_t(const BenchConfig& cfg) {
  const KernelKind kind = parse_kernel(cfg.kernel);
  if (cfg.runs < 1) throw std::invalid_argument("--runs must be >= 1");

  bool run_seq = false, run_par = false;
  if (cfg.variant == "seq") run_seq = true;
  else if (cfg.variant == "par") run_par = true;
  else if (cfg.variant == "both") run_seq = run_par = true;
  else
    throw std::invalid_argument("unknown variant '" + cfg.variant +
                                "' (expected seq|par|both)");

  MttkrpStrategy strat;
  if (cfg.strategy == "privatize") strat = MttkrpStrategy::privatize;
  else if (cfg.strategy == "atomic") strat = MttkrpStrategy::atomic;
  else
    throw std::invalid_argument("unknown strategy '" + cfg.strategy +
                                "' (expected privatize|atomic)");

  ElemOp eop = ElemOp::add;
  ScalarOp sop = ScalarOp::add;
  switch (kind) {
    case KernelKind::tew_eq:
    case KernelKind::tew:
      if (cfg.op == "add") eop = ElemOp::add;
      else if (cfg.op == "sub") eop = ElemOp::sub;
      else if (cfg.op == "mul") eop = ElemOp::mul;
      else if (cfg.op == "div" && kind == KernelKind::tew_eq) eop = ElemOp::div;
      else
        throw std::invalid_argument("kernel " + cfg.kernel + " does not support op '" +
                                    cfg.op + "'");
      break;
    case KernelKind::ts:
      if (cfg.op == "add") sop = ScalarOp::add;
      else if (cfg.op == "mul") sop = ScalarOp::mul;
      else
        throw std::invalid_argument("kernel ts does not support op '" + cfg.op + "'");
      break;
    case KernelKind::ttm:
    case KernelKind::mttkrp:
      if (cfg.rank < 1) throw std::invalid_argument("--rank must be >= 1");
      break;
    default: break;
  }

  Inputs<T> in = load_inputs<T>(cfg, kind);
  const unsigned N = in.x.order();
  const int par_threads = par::resolve_threads(cfg.threads);
  const double mttkrp_tol = cfg.precision == "f32" ? 1e-4 : 1e-10;

  BenchReport base;
  base.tensor = in.name;
  base.dims = in.x.dims;
  base.nnz = in.x.nnz();
  base.kernel = cfg.kernel;
  base.runs = cfg.runs;
  base.host = host_tag();
  base.precision = cfg.precision;
  base.max_threads = omp_get_max_threads();
  const bool elementwise =
      kind == KernelKind::tew_eq || kind == KernelKind::tew || kind == KernelKind::ts;
  if (elementwise) base.op = cfg.op;
  if (kind == KernelKind::ttm || kind == KernelKind::mttkrp) base.rank = cfg.rank;

  std::vector<BenchReport> rows;

  if (elementwise) {
    double sort_s = 0.0;
    if (kind == KernelKind::tew) {
      sort_s = time_call([&] {
        const auto asc = ascending_order(N);
        sort_lexicographic(in.x, asc);
        sort_lexicographic(in.y, asc);
      });
    }
    std::optional<CostEstimate> cost;
    if (N == 3) {
      CostInputs ci;
      ci.nnz = in.x.nnz();
      cost = estimate(kind == KernelKind::ts ? Workload::ts : Workload::tew, ci);
    }

    SparseTensorCOO<T> out_seq, out_par;
    if (run_seq) {
      VariantResult vr = bench_variant(
          [&] {
            switch (kind) {
              case KernelKind::tew_eq: out_seq = seq::tew_eq(in.x, in.y, eop); break;
              case KernelKind::tew: out_seq = seq::tew(in.x, in.y, eop); break;
              default: out_seq = seq::ts(in.x, static_cast<T>(cfg.scalar), sop); break;
            }
          },
          cfg.runs);
      rows.push_back(finish_row(base, "", "seq", 1, "", std::move(vr), sort_s, 0.0, cost));
    }
    if (run_par) {
      VariantResult vr = bench_variant(
          [&] {
            switch (kind) {
              case KernelKind::tew_eq:
                out_par = par::tew_eq(in.x, in.y, eop, cfg.threads);
                break;
              case KernelKind::tew: out_par = par::tew(in.x, in.y, eop, cfg.threads); break;
              default:
                out_par = par::ts(in.x, static_cast<T>(cfg.scalar), sop, cfg.threads);
                break;
            }
          },
          cfg.runs);
      rows.push_back(
          finish_row(base, "", "par", par_threads, "", std::move(vr), sort_s, 0.0, cost));
    }
    if (run_seq && run_par) set_crosscheck(rows, bit_identical(out_seq, out_par));
    return rows;
  }

  // modal kernels: ttv / ttm / mttkrp
  std::vector<unsigned> modes;
  if (cfg.mode == "all") {
    for (unsigned d = 0; d < N; ++d) modes.push_back(d);
  } else {
    const std::uint64_t k = parse_u64(cfg.mode, "mode");
    if (k >= N)
      throw std::invalid_argument("mode " + cfg.mode + " out of range for an order-" +
                                  std::to_string(N) + " tensor");
    modes.push_back(static_cast<unsigned>(k));
  }

  for (unsigned k : modes) {
    const double sort_s =
        time_call([&] { sort_lexicographic(in.x, mode_last_order(N, k)); });
    FiberIndex fib;
    double prep_s = 0.0;
    if (kind == KernelKind::ttv || kind == KernelKind::ttm)
      prep_s = time_call([&] { fib = build_fiber_index(in.x, k); });

    std::optional<CostEstimate> cost;
    if (N == 3) {
      CostInputs ci;
      ci.nnz = in.x.nnz();
      Workload w = Workload::ttv;
      if (kind == KernelKind::ttv) {
        ci.nfibs = fib.nfibs;
      } else if (kind == KernelKind::ttm) {
        w = Workload::ttm;
        ci.nfibs = fib.nfibs;
        ci.I = in.x.dims[k];
        ci.R = cfg.rank;
      } else {
        w = Workload::mttkrp;
        ci.I = in.x.dims[k];
        ci.R = cfg.rank;
      }
      cost = estimate(w, ci);
    }

    std::mt19937_64 oprng(in.seed ^ (0x517cc1b727220a95ull + k));
    const std::string mode_label = std::to_string(k);

    if (kind == KernelKind::ttv) {
      const DenseVector<T> v = random_vector<T>(in.x.dims[k], oprng);
      SparseTensorCOO<T> out_seq, out_par;
      if (run_seq) {
        VariantResult vr =
            bench_variant([&] { out_seq = seq::ttv(in.x, v, k, fib); }, cfg.runs);
        rows.push_back(
            finish_row(base, mode_label, "seq", 1, "", std::move(vr), sort_s, prep_s, cost));
      }
      if (run_par) {
        VariantResult vr = bench_variant(
            [&] { out_par = par::ttv(in.x, v, k, fib, cfg.threads); }, cfg.runs);
        rows.push_back(finish_row(base, mode_label, "par", par_threads, "", std::move(vr),
                                  sort_s, prep_s, cost));
      }
      if (run_seq && run_par) set_crosscheck(rows, bit_identical(out_seq, out_par));
    } else if (kind == KernelKind::ttm) {
      const DenseMatrix<T> u = random_matrix<T>(in.x.dims[k], cfg.rank, oprng);
      SparseTensorCOO<T> out_seq, out_par;
      if (run_seq) {
        VariantResult vr =
            bench_variant([&] { out_seq = seq::ttm(in.x, u, k, fib); }, cfg.runs);
        rows.push_back(
            finish_row(base, mode_label, "seq", 1, "", std::move(vr), sort_s, prep_s, cost));
      }
      if (run_par) {
        VariantResult vr = bench_variant(
            [&] { out_par = par::ttm(in.x, u, k, fib, cfg.threads); }, cfg.runs);
        rows.push_back(finish_row(base, mode_label, "par", par_threads, "", std::move(vr),
                                  sort_s, prep_s, cost));
      }
      if (run_seq && run_par) set_crosscheck(rows, bit_identical(out_seq, out_par));
    } else {
      std::vector<DenseMatrix<T>> factors(N);
      for (unsigned d = 0; d < N; ++d)
        if (d != k) factors[d] = random_matrix<T>(in.x.dims[d], cfg.rank, oprng);
      DenseMatrix<T> out_seq, out_par;
      if (run_seq) {
        VariantResult vr =
            bench_variant([&] { out_seq = seq::mttkrp(in.x, factors, k); }, cfg.runs);
        rows.push_back(
            finish_row(base, mode_label, "seq", 1, "", std::move(vr), sort_s, prep_s, cost));
      }
      if (run_par) {
        VariantResult vr = bench_variant(
            [&] { out_par = par::mttkrp(in.x, factors, k, cfg.threads, strat); }, cfg.runs);
        rows.push_back(finish_row(base, mode_label, "par", par_threads, to_string(strat),
                                  std::move(vr), sort_s, prep_s, cost));
      }
      if (run_seq && run_par)
        set_crosscheck(rows, max_rel_diff(out_seq, out_par) <= mttkrp_tol);
    }
  }

  // position-wise sum row per variant
  if (cfg.mode == "all") {
    for (const char* variant : {"seq", "par"}) {
      if ((variant[0] == 's' && !run_seq) || (variant[0] == 'p' && !run_par)) continue;
      BenchReport sum = base;
      sum.mode = "all";
      sum.variant = variant;
      sum.times_s.assign(cfg.runs, 0.0);
      for (const BenchReport& r : rows) {
        if (r.variant != variant || r.mode == "all") continue;
        for (int i = 0; i < cfg.runs; ++i) sum.times_s[i] += r.times_s[i];
        sum.sort_s += r.sort_s;
        sum.preprocess_s += r.preprocess_s;
        sum.flops += r.flops;
        sum.threads = r.threads;
        sum.strategy = r.strategy;
      }
      sum.mean_s = mean(sum.times_s);
      sum.gflops = sum.mean_s > 0.0 ? static_cast<double>(sum.flops) / sum.mean_s / 1e9 : 0.0;
      rows.push_back(std::move(sum));
    }
  }
  return rows;
}

}  // namespace

std::vector<BenchReport> run_bench(const BenchConfig& cfg) {
  if (cfg.precision == "f32") return run_bench_t<float>(cfg);
  if (cfg.precision == "f64") return run_bench_t<double>(cfg);
  throw std::invalid_argument("unknown precision '" + cfg.precision + "' (expected f32|f64)");
}

}  // namespace spten
