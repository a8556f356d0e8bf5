#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace spten {

using Index = std::uint32_t;

// Order-N sparse tensor in coordinate format: one index array per mode plus a
// parallel value array, all of length nnz. Entries appear in arbitrary order
// unless sort_order records the mode order of the last lexicographic sort.
// coalesced == true means no two entries share a full index tuple. Explicit
// stored zeros are legal entries and count toward nnz.
template <typename T>
struct SparseTensorCOO {
  std::vector<Index> dims;
  std::vector<std::vector<Index>> indices;  // indices[mode][entry]
  std::vector<T> values;
  std::optional<std::vector<unsigned>> sort_order;
  bool coalesced = false;

  SparseTensorCOO() = default;
  explicit SparseTensorCOO(std::vector<Index> d)
      : dims(std::move(d)), indices(dims.size()) {}

  unsigned order() const { return static_cast<unsigned>(dims.size()); }
  std::size_t nnz() const { return values.size(); }

  void reserve(std::size_t n) {
    for (auto& ix : indices) ix.reserve(n);
    values.reserve(n);
  }

  void resize(std::size_t n) {
    for (auto& ix : indices) ix.resize(n);
    values.resize(n);
  }

  void push_back(std::span<const Index> idx, T v) {
    for (unsigned d = 0; d < order(); ++d) indices[d].push_back(idx[d]);
    values.push_back(v);
  }

  // Append entry m of src with a (possibly transformed) value.
  void append_entry(const SparseTensorCOO& src, std::size_t m, T v) {
    for (unsigned d = 0; d < order(); ++d) indices[d].push_back(src.indices[d][m]);
    values.push_back(v);
  }
};

template <typename T>
struct DenseVector {
  std::vector<T> data;

  DenseVector() = default;
  explicit DenseVector(std::size_t n, T fill = T(0)) : data(n, fill) {}

  std::size_t len() const { return data.size(); }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }
};

// Row-major dense matrix.
template <typename T>
struct DenseMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<T> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, T fill = T(0))
      : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Fibers of a tensor sorted with `mode` as the last (fastest-varying) sort key:
// entry range [fptr[f], fptr[f+1]) holds fiber f, i.e. all entries sharing one
// tuple of non-`mode` indices.
struct FiberIndex {
  unsigned mode = 0;
  std::size_t nfibs = 0;
  std::vector<std::size_t> fptr;  // nfibs + 1 offsets, fptr[0] == 0, fptr[nfibs] == nnz
};

// Three-way comparison of entry a in x vs entry b in y under the given mode order.
template <typename T>
inline int compare_entries(const SparseTensorCOO<T>& x, std::size_t a,
                           const SparseTensorCOO<T>& y, std::size_t b,
                           std::span<const unsigned> order) {
  for (unsigned d : order) {
    const Index ia = x.indices[d][a], ib = y.indices[d][b];
    if (ia != ib) return ia < ib ? -1 : 1;
  }
  return 0;
}

template <typename T>
inline bool same_structure(const SparseTensorCOO<T>& a, const SparseTensorCOO<T>& b) {
  return a.dims == b.dims && a.indices == b.indices;
}

namespace detail {
inline std::uint32_t value_bits(float v) { return std::bit_cast<std::uint32_t>(v); }
inline std::uint64_t value_bits(double v) { return std::bit_cast<std::uint64_t>(v); }
}  // namespace detail

// Structural equality plus bitwise value equality (distinguishes -0.0/+0.0, NaN payloads).
template <typename T>
inline bool bit_identical(const SparseTensorCOO<T>& a, const SparseTensorCOO<T>& b) {
  if (!same_structure(a, b)) return false;
  for (std::size_t m = 0; m < a.values.size(); ++m)
    if (detail::value_bits(a.values[m]) != detail::value_bits(b.values[m])) return false;
  return true;
}

template <typename T>
inline bool bit_identical(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    if (detail::value_bits(a.data[i]) != detail::value_bits(b.data[i])) return false;
  return true;
}

// Largest elementwise relative difference |a - b| / max(|a|, |b|); 0 when both
// elements are zero, +inf on shape mismatch.
template <typename T>
inline double max_rel_diff(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.rows != b.rows || a.cols != b.cols) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double av = static_cast<double>(a.data[i]), bv = static_cast<double>(b.data[i]);
    if (av == 0.0 && bv == 0.0) continue;
    worst = std::max(worst, std::abs(av - bv) / std::max(std::abs(av), std::abs(bv)));
  }
  return worst;
}

std::vector<unsigned> ascending_order(unsigned n);
// All modes except `mode` ascending, then `mode` last (the orientation ttv/ttm need).
std::vector<unsigned> mode_last_order(unsigned n, unsigned mode);

// In-place stable lexicographic sort of entries under mode_order (first mode in
// mode_order is the slowest-varying key). Sets t.sort_order.
template <typename T>
void sort_lexicographic(SparseTensorCOO<T>& t, std::span<const unsigned> mode_order);

// Returns a tensor with duplicate index tuples merged by summation (order of the
// original entries preserved within each group). Result is sorted (keeps t's sort
// order, ascending if t was unsorted) and marked coalesced. Sums that come out
// 0 are kept as explicit zeros.
template <typename T>
SparseTensorCOO<T> coalesce(const SparseTensorCOO<T>& t);

// Requires t sorted with `mode` last (t.sort_order set, back() == mode).
template <typename T>
FiberIndex build_fiber_index(const SparseTensorCOO<T>& t, unsigned mode);

// Mode-n matricization: order-2 tensor with
//   row = linearization of the non-`mode` indices, ascending mode number,
//         first remaining mode slowest-varying;
//   col = the `mode` index.
// Entry storage order is preserved. Requires t coalesced; rejects row spaces
// that overflow Index.
template <typename T>
SparseTensorCOO<T> matricize(const SparseTensorCOO<T>& t, unsigned mode);

// Inverse of matricize given the original dims and mode.
template <typename T>
SparseTensorCOO<T> dematricize(const SparseTensorCOO<T>& m, std::vector<Index> dims,
                               unsigned mode);

// Throws if structural invariants are violated (array lengths, index bounds,
// sort_order a valid permutation and actually satisfied, coalesced uniqueness).
template <typename T>
void validate(const SparseTensorCOO<T>& t);

}  // namespace spten
