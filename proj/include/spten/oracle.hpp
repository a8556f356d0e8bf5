#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spten/ops.hpp"
#include "spten/tensor.hpp"

// Brute-force dense reference implementations used to check the sparse kernels.
// Everything here computes in double via literal evaluation of the defining
// summations (plain loop nests over the full index space); none of it shares
// code with the kernels. Intentionally simple and slow, guarded to small sizes.
namespace spten::oracle {

inline constexpr std::size_t kMaxDenseElems = 10'000'000;

// Row-major order-N dense tensor, last mode fastest-varying.
struct DenseTensor {
  std::vector<Index> dims;
  std::vector<double> data;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<Index> d);

  std::size_t size() const { return data.size(); }
  std::size_t linear(std::span<const Index> idx) const;
  double& at(std::span<const Index> idx) { return data[linear(idx)]; }
  double at(std::span<const Index> idx) const { return data[linear(idx)]; }
};

// Odometer step over the full index space (last mode fastest). Returns false
// after the last tuple wraps back to all zeros.
bool next_index(std::vector<Index>& idx, std::span<const Index> dims);

// Duplicate tuples accumulate (in entry storage order). The padded overload
// requires dims >= t.dims per mode.
template <typename T>
DenseTensor densify(const SparseTensorCOO<T>& t);
template <typename T>
DenseTensor densify(const SparseTensorCOO<T>& t, std::vector<Index> dims);

// Non-zeros of d in ascending index order; exact zeros are dropped.
SparseTensorCOO<double> sparsify(const DenseTensor& d);

template <typename T>
DenseMatrix<double> widen(const DenseMatrix<T>& m);
template <typename T>
std::vector<double> widen(const std::vector<T>& v);

DenseTensor dense_tew(const DenseTensor& x, const DenseTensor& y, ElemOp op);
DenseTensor dense_ts(const DenseTensor& x, double s, ScalarOp op);
DenseTensor dense_ttv(const DenseTensor& x, std::span<const double> v, unsigned mode);
DenseTensor dense_ttm(const DenseTensor& x, const DenseMatrix<double>& u, unsigned mode);
DenseMatrix<double> dense_mttkrp(const DenseTensor& x,
                                 const std::vector<DenseMatrix<double>>& factors,
                                 unsigned mode);

DenseMatrix<double> matmul(const DenseMatrix<double>& a, const DenseMatrix<double>& b);
DenseMatrix<double> kronecker(const DenseMatrix<double>& a, const DenseMatrix<double>& b);
// Columnwise Kronecker; a and b must share the column count.
DenseMatrix<double> khatri_rao(const DenseMatrix<double>& a, const DenseMatrix<double>& b);

// Mode-n unfolding: rows linearize the non-mode indices (ascending mode number,
// first remaining mode slowest), columns are the mode index. Matches the sparse
// matricize convention.
DenseMatrix<double> dense_matricize(const DenseTensor& x, unsigned mode);
// Inverse of dense_matricize given the target dims.
DenseTensor dense_tensorize(const DenseMatrix<double>& m, std::vector<Index> dims,
                            unsigned mode);

// Second formulation of the mode product: unfold, multiply, fold back
// (Y_(n) = X_(n) * U).
DenseTensor ttm_via_matricization(const DenseTensor& x, const DenseMatrix<double>& u,
                                  unsigned mode);

// Second formulation of mttkrp: M = X_(n)^T * (Khatri-Rao chain of the other
// factors in ascending mode order, lowest mode slowest-varying, to match the
// unfolding's row linearization).
DenseMatrix<double> mttkrp_via_khatri_rao(const DenseTensor& x,
                                          const std::vector<DenseMatrix<double>>& factors,
                                          unsigned mode);

}  // namespace spten::oracle
