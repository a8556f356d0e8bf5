#pragma once

#include <vector>

#include "spten/ops.hpp"
#include "spten/tensor.hpp"

namespace spten {

// Sequential reference kernels. Each counts its floating-point operations into
// the global flop counter (one elementwise op per counted flop; multiply-add
// pairs count as two).
namespace seq {

// Elementwise op of two tensors with identical dimensions AND identical nonzero
// patterns (indices must match entry for entry, any storage order). Output reuses
// x's pattern. div checks y's stored values for zero.
template <typename T>
SparseTensorCOO<T> tew_eq(const SparseTensorCOO<T>& x, const SparseTensorCOO<T>& y,
                          ElemOp op);

// General elementwise op of two coalesced tensors with equal order (dimensions
// may differ; output dims are the per-mode max). Runs a sorted two-pointer
// merge; sorts both inputs ascending in place first unless they already share a
// sort order. add/sub keep unmatched entries (sub negates y's), mul drops them;
// div is rejected, as unmatched entries would divide by an implicit zero.
// Output is built by dynamic append; its nnz is |union| for add/sub and
// |intersection| for mul.
template <typename T>
SparseTensorCOO<T> tew(SparseTensorCOO<T>& x, SparseTensorCOO<T>& y, ElemOp op);

// Tensor-scalar op over the stored values; indices are copied unchanged.
template <typename T>
SparseTensorCOO<T> ts(const SparseTensorCOO<T>& x, T s, ScalarOp op);

// Tensor-times-vector along `mode`: one output entry per fiber. Requires x
// coalesced and sorted with `mode` as the last key, order >= 2, and
// v.len() == dims[mode]. The overload without a FiberIndex builds one.
template <typename T>
SparseTensorCOO<T> ttv(const SparseTensorCOO<T>& x, const DenseVector<T>& v, unsigned mode,
                       const FiberIndex& fib);
template <typename T>
SparseTensorCOO<T> ttv(const SparseTensorCOO<T>& x, const DenseVector<T>& v, unsigned mode);

// Tensor-times-matrix along `mode` (u is dims[mode] x R): each fiber expands to
// R output entries, mode index 0..R-1. Same sorting requirements as ttv.
template <typename T>
SparseTensorCOO<T> ttm(const SparseTensorCOO<T>& x, const DenseMatrix<T>& u, unsigned mode,
                       const FiberIndex& fib);
template <typename T>
SparseTensorCOO<T> ttm(const SparseTensorCOO<T>& x, const DenseMatrix<T>& u, unsigned mode);

// Matricized tensor times Khatri-Rao product for `mode`: out(i_mode, r) +=
// val * prod over other modes d of factors[d](i_d, r). factors must hold one
// matrix per mode (factors[mode] is ignored and may be empty); all used factors
// share column count R and have rows == dims[d]. x must be coalesced; any
// storage order works and the result is independent of it up to rounding
// (accumulation follows entry order).
template <typename T>
DenseMatrix<T> mttkrp(const SparseTensorCOO<T>& x, const std::vector<DenseMatrix<T>>& factors,
                      unsigned mode);

}  // namespace seq
}  // namespace spten
