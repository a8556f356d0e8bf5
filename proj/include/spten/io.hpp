#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spten/tensor.hpp"

namespace spten {

// Text format for sparse tensors: one entry per line, N 1-based indices then
// the value, whitespace separated; '#' starts a comment line; blank lines are
// ignored. The order is taken from the first data line (or from the dims
// override); dimensions are the per-mode index maxima unless overridden.
// Parse errors carry "path:line:". The result is unsorted/uncoalesced as far
// as the flags are concerned (nothing in the format guarantees either).
template <typename T>
SparseTensorCOO<T> read_tns(const std::string& path,
                            std::optional<std::vector<Index>> dims = std::nullopt);

// One entry per line, single spaces, '\n' endings, shortest round-trip value
// formatting; no header. read_tns(write_tns(t)) reproduces t's entries (same
// order) and values bit for bit.
template <typename T>
void write_tns(const SparseTensorCOO<T>& t, const std::string& path);

enum class SyntheticDist { uniform, slice_skewed };

// Deterministic random tensor: `nnz` distinct index tuples, values in [1, 2).
// uniform draws tuples uniformly; slice_skewed places round(skew_fraction*nnz)
// entries in slice 0 of mode 0 and spreads the rest over the other slices
// (useful for exercising load-balanced partitioning). Throws when nnz (or the
// per-region allocation) exceeds the index-space capacity.
template <typename T>
SparseTensorCOO<T> gen_synthetic(const std::vector<Index>& dims, std::size_t nnz,
                                 std::uint64_t seed,
                                 SyntheticDist dist = SyntheticDist::uniform,
                                 double skew_fraction = 0.0);

// One record per dataset in a human-editable key:value format:
//
//   tensor: nell2
//   order: 3
//   dims: 12092 9184 28818
//   nnz: 76879419
//   density: 2.4e-05
//   source: http://...      (optional)
//   checksum: sha256:...    (optional)
//
// Used to pin authoritative dims for files whose entries do not reach every
// dimension's extent (read_tns takes the dims as an override).
struct ManifestEntry {
  std::string name;
  unsigned order = 0;
  std::vector<Index> dims;
  std::uint64_t nnz = 0;
  double density = 0.0;
  std::string source;
  std::string checksum;

  bool operator==(const ManifestEntry&) const = default;
};

// Validates each record: order matches dims, density within 5% of
// nnz / prod(dims), no duplicate or unknown keys. Errors carry "path:line:".
std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(std::span<const ManifestEntry> entries, const std::string& path);
const ManifestEntry* find_entry(std::span<const ManifestEntry> entries,
                                const std::string& name);

}  // namespace spten
