#include "spten/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

namespace spten {

namespace {

void split_ws(std::string_view sv, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < sv.size()) {
    while (i < sv.size() && (sv[i] == ' ' || sv[i] == '\t')) ++i;
    if (i >= sv.size()) break;
    std::size_t b = i;
    while (i < sv.size() && sv[i] != ' ' && sv[i] != '\t') ++i;
    out.push_back(sv.substr(b, i - b));
  }
}

std::string_view trim(std::string_view sv) {
  while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
  while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r'))
    sv.remove_suffix(1);
  return sv;
}

[[noreturn]] void fail_at(const std::string& path, std::size_t lineno, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
}

}  // namespace

template <typename T>
SparseTensorCOO<T> read_tns(const std::string& path, std::optional<std::vector<Index>> dims) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_tns: cannot open " + path);

  SparseTensorCOO<T> t;
  unsigned N = 0;
  bool have_order = false;
  if (dims) {
    N = static_cast<unsigned>(dims->size());
    if (N == 0) throw std::invalid_argument("read_tns: dims override must not be empty");
    have_order = true;
    t.dims = *dims;
    t.indices.resize(N);
  }

  std::vector<Index> maxidx;
  std::string line;
  std::vector<std::string_view> tok;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    const std::size_t first = sv.find_first_not_of(" \t");
    if (first == std::string_view::npos || sv[first] == '#') continue;

    split_ws(sv, tok);
    if (!have_order) {
      if (tok.size() < 2)
        fail_at(path, lineno, "need at least one index and a value per entry");
      N = static_cast<unsigned>(tok.size() - 1);
      have_order = true;
      t.indices.resize(N);
      maxidx.assign(N, 0);
    } else if (tok.size() != static_cast<std::size_t>(N) + 1) {
      fail_at(path, lineno, "expected " + std::to_string(N + 1) + " tokens, got " +
                                std::to_string(tok.size()));
    }

    for (unsigned d = 0; d < N; ++d) {
      const std::string_view s = tok[d];
      std::uint64_t raw = 0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), raw);
      if (ec != std::errc{} || p != s.data() + s.size())
        fail_at(path, lineno, "non-numeric index token '" + std::string(s) + "'");
      if (raw < 1) fail_at(path, lineno, "indices are 1-based; got 0");
      if (raw > std::numeric_limits<Index>::max())
        fail_at(path, lineno, "index " + std::to_string(raw) + " out of range");
      const Index idx = static_cast<Index>(raw - 1);
      if (dims) {
        if (idx >= t.dims[d])
          fail_at(path, lineno, "index " + std::to_string(raw) +
                                    " exceeds declared dimension " + std::to_string(t.dims[d]) +
                                    " of mode " + std::to_string(d));
      } else if (idx > maxidx[d]) {
        maxidx[d] = idx;
      }
      t.indices[d].push_back(idx);
    }

    const std::string_view s = tok[N];
    T val;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), val);
    if (ec != std::errc{} || p != s.data() + s.size())
      fail_at(path, lineno, "unparsable value '" + std::string(s) + "'");
    t.values.push_back(val);
  }
  if (in.bad()) throw std::runtime_error("read_tns: I/O error reading " + path);
  if (!have_order)
    throw std::runtime_error("read_tns: " + path +
                             " has no entries and no dims override; order is unknown");
  if (!dims) {
    t.dims.resize(N);
    for (unsigned d = 0; d < N; ++d) t.dims[d] = t.nnz() ? maxidx[d] + 1 : 0;
  }
  return t;
}

template <typename T>
void write_tns(const SparseTensorCOO<T>& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_tns: cannot open " + path);

  std::string buf;
  buf.reserve(1 << 20);
  char num[64];
  const std::size_t n = t.nnz();
  const unsigned N = t.order();
  for (std::size_t m = 0; m < n; ++m) {
    for (unsigned d = 0; d < N; ++d) {
      const auto [p, ec] =
          std::to_chars(num, num + sizeof num, static_cast<std::uint64_t>(t.indices[d][m]) + 1);
      buf.append(num, p);
      buf.push_back(' ');
    }
    const auto [p, ec] = std::to_chars(num, num + sizeof num, t.values[m]);
    buf.append(num, p);
    buf.push_back('\n');
    if (buf.size() >= (1 << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write_tns: I/O error writing " + path);
}

template <typename T>
SparseTensorCOO<T> gen_synthetic(const std::vector<Index>& dims, std::size_t nnz,
                                 std::uint64_t seed, SyntheticDist dist,
                                 double skew_fraction) {
  const unsigned N = static_cast<unsigned>(dims.size());
  if (N == 0) throw std::invalid_argument("gen_synthetic: order must be >= 1");
  std::uint64_t total = 1;
  for (Index d : dims) {
    if (d == 0) {
      total = 0;
      break;
    }
    if (total > std::numeric_limits<std::uint64_t>::max() / d)
      throw std::invalid_argument("gen_synthetic: index space too large");
    total *= d;
  }
  if (nnz > total)
    throw std::invalid_argument("gen_synthetic: nnz " + std::to_string(nnz) +
                                " exceeds index-space capacity " + std::to_string(total));

  std::mt19937_64 rng(seed);
  SparseTensorCOO<T> t(dims);
  t.reserve(nnz);

  const std::uint64_t slice_cap = N > 0 && dims[0] > 0 ? total / dims[0] : 0;
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(nnz * 2);

  std::vector<Index> idx(N);
  auto decode = [&](std::uint64_t lin) {
    for (unsigned d = N; d-- > 0;) {
      idx[d] = static_cast<Index>(lin % dims[d]);
      lin /= dims[d];
    }
  };
  auto emit = [&]() {
    const T val = static_cast<T>(std::uniform_real_distribution<double>(1.0, 2.0)(rng));
    t.push_back(idx, val);
  };

  // Draw `count` distinct tuples whose mode-0 index lies in [slice_lo, slice_hi).
  auto sample_region = [&](std::size_t count, Index slice_lo, Index slice_hi) {
    if (count == 0) return;
    const std::uint64_t cap = static_cast<std::uint64_t>(slice_hi - slice_lo) * slice_cap;
    if (count > cap)
      throw std::invalid_argument("gen_synthetic: region [" + std::to_string(slice_lo) + "," +
                                  std::to_string(slice_hi) + ") of mode 0 cannot hold " +
                                  std::to_string(count) + " distinct entries");
    if (2 * static_cast<std::uint64_t>(count) >= cap) {
      // dense region: enumerate its tuples and take a random prefix of a shuffle
      std::vector<std::uint64_t> ids(cap);
      std::iota(ids.begin(), ids.end(),
                static_cast<std::uint64_t>(slice_lo) * slice_cap);
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t j =
            std::uniform_int_distribution<std::uint64_t>(i, cap - 1)(rng);
        std::swap(ids[i], ids[j]);
        decode(ids[i]);
        seen.insert(ids[i]);
        emit();
      }
      return;
    }
    std::size_t accepted = 0;
    while (accepted < count) {
      idx[0] = std::uniform_int_distribution<Index>(slice_lo, slice_hi - 1)(rng);
      for (unsigned d = 1; d < N; ++d)
        idx[d] = std::uniform_int_distribution<Index>(0, dims[d] - 1)(rng);
      std::uint64_t lin = 0;
      for (unsigned d = 0; d < N; ++d) lin = lin * dims[d] + idx[d];
      if (!seen.insert(lin).second) continue;
      emit();
      ++accepted;
    }
  };

  if (dist == SyntheticDist::uniform) {
    sample_region(nnz, 0, dims[0]);
  } else {
    if (skew_fraction < 0.0 || skew_fraction > 1.0)
      throw std::invalid_argument("gen_synthetic: skew_fraction must be in [0, 1]");
    const std::size_t n0 =
        std::min<std::size_t>(nnz, static_cast<std::size_t>(skew_fraction * nnz + 0.5));
    const std::size_t rest = nnz - n0;
    if (rest > 0 && dims[0] < 2)
      throw std::invalid_argument(
          "gen_synthetic: slice_skewed needs dims[0] >= 2 to place entries outside slice 0");
    sample_region(n0, 0, 1);
    if (rest > 0) sample_region(rest, 1, dims[0]);
  }

  t.coalesced = true;  // tuples are distinct by construction
  return t;
}

// ---- manifest ----------------------------------------------------------------

namespace {

void finish_entry(const std::string& path, std::size_t start_line, ManifestEntry& e,
                  const std::vector<std::string>& keys_seen, std::vector<ManifestEntry>& out) {
  auto has = [&](const char* k) {
    return std::find(keys_seen.begin(), keys_seen.end(), k) != keys_seen.end();
  };
  auto fail = [&](const std::string& msg) {
    fail_at(path, start_line, "tensor record '" + e.name + "': " + msg);
  };
  for (const char* k : {"order", "dims", "nnz", "density"})
    if (!has(k)) fail(std::string("missing required field '") + k + "'");
  if (e.order != e.dims.size())
    fail("order " + std::to_string(e.order) + " does not match " +
         std::to_string(e.dims.size()) + " dims");
  double prod = 1.0;
  for (Index d : e.dims) prod *= static_cast<double>(d);
  const double computed = prod > 0.0 ? static_cast<double>(e.nnz) / prod : 0.0;
  const bool ok = e.density == 0.0 ? computed == 0.0
                                   : std::abs(computed - e.density) <= 0.05 * e.density;
  if (!ok)
    fail("density " + std::to_string(e.density) + " is not within 5% of nnz/prod(dims) = " +
         std::to_string(computed));
  for (const ManifestEntry& prev : out)
    if (prev.name == e.name) fail("duplicate tensor name");
  out.push_back(std::move(e));
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_manifest: cannot open " + path);

  std::vector<ManifestEntry> out;
  ManifestEntry cur;
  std::vector<std::string> keys_seen;
  bool open = false;
  std::size_t start_line = 0, lineno = 0;
  std::string line;
  std::vector<std::string_view> tok;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const std::size_t colon = sv.find(':');
    if (colon == std::string_view::npos)
      fail_at(path, lineno, "expected 'key: value'");
    const std::string key(trim(sv.substr(0, colon)));
    const std::string_view val = trim(sv.substr(colon + 1));

    if (key == "tensor") {
      if (open) finish_entry(path, start_line, cur, keys_seen, out);
      cur = ManifestEntry{};
      keys_seen.clear();
      open = true;
      start_line = lineno;
      cur.name = std::string(val);
      if (cur.name.empty()) fail_at(path, lineno, "tensor name must not be empty");
      continue;
    }
    if (!open) fail_at(path, lineno, "field '" + key + "' outside a tensor record");
    if (std::find(keys_seen.begin(), keys_seen.end(), key) != keys_seen.end())
      fail_at(path, lineno, "duplicate field '" + key + "'");

    if (key == "order") {
      const auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), cur.order);
      if (ec != std::errc{} || p != val.data() + val.size() || cur.order == 0)
        fail_at(path, lineno, "invalid order '" + std::string(val) + "'");
    } else if (key == "dims") {
      split_ws(val, tok);
      if (tok.empty()) fail_at(path, lineno, "dims must list at least one extent");
      for (std::string_view s : tok) {
        std::uint64_t d = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
        if (ec != std::errc{} || p != s.data() + s.size() || d == 0 ||
            d > std::numeric_limits<Index>::max())
          fail_at(path, lineno, "invalid dimension '" + std::string(s) + "'");
        cur.dims.push_back(static_cast<Index>(d));
      }
    } else if (key == "nnz") {
      const auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), cur.nnz);
      if (ec != std::errc{} || p != val.data() + val.size())
        fail_at(path, lineno, "invalid nnz '" + std::string(val) + "'");
    } else if (key == "density") {
      const auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), cur.density);
      if (ec != std::errc{} || p != val.data() + val.size() || cur.density < 0.0)
        fail_at(path, lineno, "invalid density '" + std::string(val) + "'");
    } else if (key == "source") {
      cur.source = std::string(val);
    } else if (key == "checksum") {
      cur.checksum = std::string(val);
    } else {
      fail_at(path, lineno, "unknown field '" + key + "'");
    }
    keys_seen.push_back(key);
  }
  if (in.bad()) throw std::runtime_error("read_manifest: I/O error reading " + path);
  if (open) finish_entry(path, start_line, cur, keys_seen, out);
  return out;
}

void write_manifest(std::span<const ManifestEntry> entries, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
  char num[64];
  bool first = true;
  for (const ManifestEntry& e : entries) {
    if (!first) out << "\n";
    first = false;
    out << "tensor: " << e.name << "\n";
    out << "order: " << e.order << "\n";
    out << "dims:";
    for (Index d : e.dims) out << " " << d;
    out << "\n";
    out << "nnz: " << e.nnz << "\n";
    const auto [p, ec] = std::to_chars(num, num + sizeof num, e.density);
    out << "density: " << std::string_view(num, p - num) << "\n";
    if (!e.source.empty()) out << "source: " << e.source << "\n";
    if (!e.checksum.empty()) out << "checksum: " << e.checksum << "\n";
  }
  if (!out) throw std::runtime_error("write_manifest: I/O error writing " + path);
}

const ManifestEntry* find_entry(std::span<const ManifestEntry> entries,
                                const std::string& name) {
  for (const ManifestEntry& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

template SparseTensorCOO<float> read_tns<float>(const std::string&,
                                                std::optional<std::vector<Index>>);
template SparseTensorCOO<double> read_tns<double>(const std::string&,
                                                  std::optional<std::vector<Index>>);
template void write_tns<float>(const SparseTensorCOO<float>&, const std::string&);
template void write_tns<double>(const SparseTensorCOO<double>&, const std::string&);
template SparseTensorCOO<float> gen_synthetic<float>(const std::vector<Index>&, std::size_t,
                                                     std::uint64_t, SyntheticDist, double);
template SparseTensorCOO<double> gen_synthetic<double>(const std::vector<Index>&, std::size_t,
                                                       std::uint64_t, SyntheticDist, double);

}  // namespace spten
