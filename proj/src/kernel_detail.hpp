// Bodies shared between the sequential and parallel kernels. The parallel
// variants must match the sequential ones bit for bit (or to rounding, for
// mttkrp reductions), so any per-entry / per-fiber arithmetic lives here and is
// compiled exactly once for both.
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spten/kernels_seq.hpp"
#include "spten/tensor.hpp"

namespace spten::detail {

template <typename T>
inline T apply_elem(ElemOp op, T a, T b) {
  switch (op) {
    case ElemOp::add: return a + b;
    case ElemOp::sub: return a - b;
    case ElemOp::mul: return a * b;
    default: return a / b;
  }
}

template <typename T>
inline T apply_scalar(ScalarOp op, T a, T s) {
  return op == ScalarOp::add ? a + s : a * s;
}

// ---- tew (general, sorted merge) -------------------------------------------

template <typename T>
void check_tew_inputs(const SparseTensorCOO<T>& x, const SparseTensorCOO<T>& y, ElemOp op) {
  if (op == ElemOp::div)
    throw std::invalid_argument(
        "tew: div is not defined for mismatched patterns (unmatched entries divide by zero)");
  if (x.order() != y.order())
    throw std::invalid_argument("tew: tensors must have the same order");
  if (!x.coalesced || !y.coalesced)
    throw std::invalid_argument("tew: both inputs must be coalesced");
}

// Merge x[xb,xe) with y[yb,ye) under `order`, appending to out. Returns the
// number of flops executed. Entry semantics: matched -> op(xv, yv); unmatched
// x -> copied; unmatched y -> copied (negated for sub); mul skips unmatched.
template <typename T>
std::uint64_t merge_range(const SparseTensorCOO<T>& x, std::size_t xb, std::size_t xe,
                          const SparseTensorCOO<T>& y, std::size_t yb, std::size_t ye,
                          std::span<const unsigned> order, ElemOp op,
                          SparseTensorCOO<T>& out) {
  std::uint64_t fl = 0;
  std::size_t m1 = xb, m2 = yb;
  while (m1 < xe && m2 < ye) {
    const int c = compare_entries(x, m1, y, m2, order);
    if (c == 0) {
      out.append_entry(x, m1, apply_elem(op, x.values[m1], y.values[m2]));
      ++fl;
      ++m1;
      ++m2;
    } else if (c < 0) {
      if (op != ElemOp::mul) out.append_entry(x, m1, x.values[m1]);
      ++m1;
    } else {
      if (op == ElemOp::add) out.append_entry(y, m2, y.values[m2]);
      else if (op == ElemOp::sub) {
        out.append_entry(y, m2, -y.values[m2]);
        ++fl;
      }
      ++m2;
    }
  }
  if (op != ElemOp::mul) {
    for (; m1 < xe; ++m1) out.append_entry(x, m1, x.values[m1]);
    for (; m2 < ye; ++m2) {
      out.append_entry(y, m2, op == ElemOp::sub ? -y.values[m2] : y.values[m2]);
      if (op == ElemOp::sub) ++fl;
    }
  }
  return fl;
}

// Sort both operands ascending unless they already share a sort order; returns
// the common order.
template <typename T>
std::vector<unsigned> unify_tew_sort(SparseTensorCOO<T>& x, SparseTensorCOO<T>& y) {
  if (x.sort_order && y.sort_order && *x.sort_order == *y.sort_order) return *x.sort_order;
  const auto order = ascending_order(x.order());
  sort_lexicographic(x, order);
  sort_lexicographic(y, order);
  return order;
}

template <typename T>
std::vector<Index> tew_output_dims(const SparseTensorCOO<T>& x, const SparseTensorCOO<T>& y) {
  std::vector<Index> dims(x.order());
  for (unsigned d = 0; d < x.order(); ++d) dims[d] = std::max(x.dims[d], y.dims[d]);
  return dims;
}

// ---- ttv / ttm fibers -------------------------------------------------------

template <typename T>
void check_fiber_kernel_inputs(const SparseTensorCOO<T>& x, unsigned mode,
                               const FiberIndex& fib, const char* kernel) {
  const std::string k = kernel;
  if (x.order() < 2)
    throw std::invalid_argument(k + ": input must have order >= 2");
  if (mode >= x.order()) throw std::invalid_argument(k + ": mode out of range");
  if (!x.coalesced) throw std::invalid_argument(k + ": tensor must be coalesced");
  if (!x.sort_order || x.sort_order->back() != mode)
    throw std::invalid_argument(k + ": tensor must be sorted with the target mode last");
  if (fib.mode != mode || fib.fptr.empty() || fib.fptr.back() != x.nnz() ||
      fib.nfibs + 1 != fib.fptr.size())
    throw std::invalid_argument(k + ": fiber index does not match the tensor");
}

// Sum of val * v[mode index] over one fiber.
template <typename T>
inline T ttv_fiber_value(const Index* mode_idx, const T* vals, const T* v, std::size_t b,
                         std::size_t e) {
  T acc = T(0);
  for (std::size_t m = b; m < e; ++m) acc += vals[m] * v[mode_idx[m]];
  return acc;
}

// out_row[r] += val * u(mode index, r) over one fiber; out_row has R slots,
// zero-initialized by the caller.
template <typename T>
inline void ttm_fiber(const Index* mode_idx, const T* vals, const T* u, std::size_t R,
                      std::size_t b, std::size_t e, T* out_row) {
  for (std::size_t m = b; m < e; ++m) {
    const T val = vals[m];
    const T* urow = u + static_cast<std::size_t>(mode_idx[m]) * R;
    for (std::size_t r = 0; r < R; ++r) out_row[r] += val * urow[r];
  }
}

// Sort order of a ttv output: drop the contracted mode and renumber.
inline std::vector<unsigned> drop_mode(const std::vector<unsigned>& order, unsigned mode) {
  std::vector<unsigned> out;
  out.reserve(order.size() - 1);
  for (unsigned d : order)
    if (d != mode) out.push_back(d < mode ? d : d - 1);
  return out;
}

// ---- mttkrp -----------------------------------------------------------------

// Validates and returns R.
template <typename T>
std::size_t check_mttkrp_inputs(const SparseTensorCOO<T>& x,
                                const std::vector<DenseMatrix<T>>& factors, unsigned mode) {
  const unsigned N = x.order();
  if (N < 2) throw std::invalid_argument("mttkrp: input must have order >= 2");
  if (mode >= N) throw std::invalid_argument("mttkrp: mode out of range");
  if (!x.coalesced) throw std::invalid_argument("mttkrp: tensor must be coalesced");
  if (factors.size() != N)
    throw std::invalid_argument("mttkrp: need one factor matrix per mode");
  std::size_t R = 0;
  for (unsigned d = 0; d < N; ++d) {
    if (d == mode) continue;
    if (R == 0) R = factors[d].cols;
    if (factors[d].cols != R)
      throw std::invalid_argument("mttkrp: factor matrices must share the column count");
    if (factors[d].rows != x.dims[d])
      throw std::invalid_argument("mttkrp: factor rows must match the mode dimension");
  }
  if (R == 0) throw std::invalid_argument("mttkrp: factor rank must be >= 1");
  return R;
}

// row[r] = val * prod over d != mode of fac[d][idx_d * R + r]. fac[mode] unused.
template <typename T>
inline void mttkrp_row(const SparseTensorCOO<T>& x, std::size_t m, unsigned mode,
                       const T* const* fac, std::size_t R, T* row) {
  const T val = x.values[m];
  for (std::size_t r = 0; r < R; ++r) row[r] = val;
  const unsigned N = x.order();
  for (unsigned d = 0; d < N; ++d) {
    if (d == mode) continue;
    const T* f = fac[d] + static_cast<std::size_t>(x.indices[d][m]) * R;
    for (std::size_t r = 0; r < R; ++r) row[r] *= f[r];
  }
}

}  // namespace spten::detail
