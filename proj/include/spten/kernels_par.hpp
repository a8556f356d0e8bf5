#pragma once

#include <cstddef>
#include <vector>

#include "spten/kernels_seq.hpp"
#include "spten/ops.hpp"
#include "spten/tensor.hpp"

namespace spten {

// Partition of two same-order tensors (both sorted by the same mode order) into
// contiguous groups of slices of the leading sort mode. No slice is ever split
// across partitions, so partitions write disjoint output slices and can be
// merged independently. boundaries holds parts()+1 cut points in slice-index
// space; x_range/y_range hold parts()+1 entry offsets into each tensor.
struct SlicePartition {
  unsigned mode = 0;
  std::vector<Index> boundaries;
  std::vector<std::size_t> x_range;
  std::vector<std::size_t> y_range;

  std::size_t parts() const { return boundaries.empty() ? 0 : boundaries.size() - 1; }
};

// OpenMP variants. Each takes an explicit thread count; nthreads <= 0 means the
// OpenMP default (so OMP_NUM_THREADS applies; an explicit argument wins over the
// environment). Output contracts match the sequential kernels exactly:
// tew_eq/ts/tew/ttv/ttm are bit-identical to seq for any thread count, mttkrp
// is bit-identical at one thread and equal to rounding otherwise.
namespace par {

int resolve_threads(int nthreads);

template <typename T>
SparseTensorCOO<T> tew_eq(const SparseTensorCOO<T>& x, const SparseTensorCOO<T>& y, ElemOp op,
                          int nthreads);

// Greedy load-balanced slice grouping over the leading sort mode: targets
// remaining_nnz / remaining_parts entries of x per partition, never splitting a
// slice. Produces at most nthreads partitions; heavily skewed slices get their
// own partition. Requires both tensors coalesced and sorted by the same order.
template <typename T>
SlicePartition partition_for_tew(const SparseTensorCOO<T>& x, const SparseTensorCOO<T>& y,
                                 int nthreads);

template <typename T>
SparseTensorCOO<T> tew(SparseTensorCOO<T>& x, SparseTensorCOO<T>& y, ElemOp op, int nthreads);

template <typename T>
SparseTensorCOO<T> ts(const SparseTensorCOO<T>& x, T s, ScalarOp op, int nthreads);

template <typename T>
SparseTensorCOO<T> ttv(const SparseTensorCOO<T>& x, const DenseVector<T>& v, unsigned mode,
                       const FiberIndex& fib, int nthreads);
template <typename T>
SparseTensorCOO<T> ttv(const SparseTensorCOO<T>& x, const DenseVector<T>& v, unsigned mode,
                       int nthreads);

template <typename T>
SparseTensorCOO<T> ttm(const SparseTensorCOO<T>& x, const DenseMatrix<T>& u, unsigned mode,
                       const FiberIndex& fib, int nthreads);
template <typename T>
SparseTensorCOO<T> ttm(const SparseTensorCOO<T>& x, const DenseMatrix<T>& u, unsigned mode,
                       int nthreads);

// privatize: per-thread dense buffers (dims[mode] x R each), reduced into the
// output in parallel over rows after the main loop. atomic: direct atomic
// accumulation into the shared output.
template <typename T>
DenseMatrix<T> mttkrp(const SparseTensorCOO<T>& x, const std::vector<DenseMatrix<T>>& factors,
                      unsigned mode, int nthreads, MttkrpStrategy strategy);

}  // namespace par
}  // namespace spten
