#include "spten/kernels_seq.hpp"

#include <stdexcept>

#include "kernel_detail.hpp"
#include "spten/flop_counter.hpp"

namespace spten {
namespace seq {

template <typename T>
SparseTensorCOO<T> tew_eq(const SparseTensorCOO<T>& x, const SparseTensorCOO<T>& y,
                          ElemOp op) {
  if (x.order() != y.order() || x.dims != y.dims)
    throw std::invalid_argument("tew_eq: tensors must have identical dimensions");
  if (x.nnz() != y.nnz())
    throw std::invalid_argument("tew_eq: tensors must have identical nonzero counts");

  const unsigned N = x.order();
  const std::size_t n = x.nnz();
  SparseTensorCOO<T> z(x.dims);
  for (unsigned d = 0; d < N; ++d) z.indices[d] = x.indices[d];
  z.values.resize(n);
  z.sort_order = x.sort_order;
  z.coalesced = x.coalesced;

  for (std::size_t m = 0; m < n; ++m) {
    for (unsigned d = 0; d < N; ++d)
      if (x.indices[d][m] != y.indices[d][m])
        throw std::invalid_argument("tew_eq: nonzero patterns differ at entry " +
                                    std::to_string(m));
    if (op == ElemOp::div && y.values[m] == T(0))
      throw std::domain_error("tew_eq: division by a stored zero at entry " +
                              std::to_string(m));
    z.values[m] = detail::apply_elem(op, x.values[m], y.values[m]);
  }
  flops::record(n);
  return z;
}

template <typename T>
SparseTensorCOO<T> tew(SparseTensorCOO<T>& x, SparseTensorCOO<T>& y, ElemOp op) {
  detail::check_tew_inputs(x, y, op);
  const auto order = detail::unify_tew_sort(x, y);

  SparseTensorCOO<T> z(detail::tew_output_dims(x, y));
  const std::uint64_t fl =
      detail::merge_range(x, 0, x.nnz(), y, 0, y.nnz(), order, op, z);
  z.sort_order = order;
  z.coalesced = true;
  flops::record(fl);
  return z;
}

template <typename T>
SparseTensorCOO<T> ts(const SparseTensorCOO<T>& x, T s, ScalarOp op) {
  const std::size_t n = x.nnz();
  SparseTensorCOO<T> z(x.dims);
  z.indices = x.indices;
  z.values.resize(n);
  z.sort_order = x.sort_order;
  z.coalesced = x.coalesced;
  for (std::size_t m = 0; m < n; ++m)
    z.values[m] = detail::apply_scalar(op, x.values[m], s);
  flops::record(n);
  return z;
}

template <typename T>
SparseTensorCOO<T> ttv(const SparseTensorCOO<T>& x, const DenseVector<T>& v, unsigned mode,
                       const FiberIndex& fib) {
  detail::check_fiber_kernel_inputs(x, mode, fib, "ttv");
  if (v.len() != x.dims[mode])
    throw std::invalid_argument("ttv: vector length must match the mode dimension");

  const unsigned N = x.order();
  std::vector<Index> out_dims;
  out_dims.reserve(N - 1);
  for (unsigned d = 0; d < N; ++d)
    if (d != mode) out_dims.push_back(x.dims[d]);

  SparseTensorCOO<T> z(std::move(out_dims));
  z.resize(fib.nfibs);
  const Index* mode_idx = x.indices[mode].data();
  const T* vals = x.values.data();
  const T* vp = v.data.data();

  std::uint64_t fl = 0;
  for (std::size_t f = 0; f < fib.nfibs; ++f) {
    const std::size_t b = fib.fptr[f], e = fib.fptr[f + 1];
    unsigned dz = 0;
    for (unsigned d = 0; d < N; ++d)
      if (d != mode) z.indices[dz++][f] = x.indices[d][b];
    z.values[f] = detail::ttv_fiber_value(mode_idx, vals, vp, b, e);
    fl += 2 * (e - b);
  }
  z.sort_order = detail::drop_mode(*x.sort_order, mode);
  z.coalesced = true;
  flops::record(fl);
  return z;
}

template <typename T>
SparseTensorCOO<T> ttv(const SparseTensorCOO<T>& x, const DenseVector<T>& v, unsigned mode) {
  return ttv(x, v, mode, build_fiber_index(x, mode));
}

template <typename T>
SparseTensorCOO<T> ttm(const SparseTensorCOO<T>& x, const DenseMatrix<T>& u, unsigned mode,
                       const FiberIndex& fib) {
  detail::check_fiber_kernel_inputs(x, mode, fib, "ttm");
  if (u.rows != x.dims[mode])
    throw std::invalid_argument("ttm: matrix rows must match the mode dimension");
  const std::size_t R = u.cols;
  if (R == 0) throw std::invalid_argument("ttm: matrix must have at least one column");

  const unsigned N = x.order();
  std::vector<Index> out_dims = x.dims;
  out_dims[mode] = static_cast<Index>(R);

  SparseTensorCOO<T> z(std::move(out_dims));
  z.resize(fib.nfibs * R);
  const Index* mode_idx = x.indices[mode].data();
  const T* vals = x.values.data();
  const T* up = u.data.data();

  std::uint64_t fl = 0;
  for (std::size_t f = 0; f < fib.nfibs; ++f) {
    const std::size_t b = fib.fptr[f], e = fib.fptr[f + 1];
    const std::size_t base = f * R;
    for (unsigned d = 0; d < N; ++d) {
      const Index id = (d == mode) ? 0 : x.indices[d][b];
      Index* zi = z.indices[d].data() + base;
      if (d == mode)
        for (std::size_t r = 0; r < R; ++r) zi[r] = static_cast<Index>(r);
      else
        for (std::size_t r = 0; r < R; ++r) zi[r] = id;
    }
    detail::ttm_fiber(mode_idx, vals, up, R, b, e, z.values.data() + base);
    fl += 2 * R * (e - b);
  }
  z.sort_order = x.sort_order;
  z.coalesced = true;
  flops::record(fl);
  return z;
}

template <typename T>
SparseTensorCOO<T> ttm(const SparseTensorCOO<T>& x, const DenseMatrix<T>& u, unsigned mode) {
  return ttm(x, u, mode, build_fiber_index(x, mode));
}

template <typename T>
DenseMatrix<T> mttkrp(const SparseTensorCOO<T>& x, const std::vector<DenseMatrix<T>>& factors,
                      unsigned mode) {
  const std::size_t R = detail::check_mttkrp_inputs(x, factors, mode);
  const unsigned N = x.order();

  DenseMatrix<T> out(x.dims[mode], R);
  std::vector<const T*> fac(N, nullptr);
  for (unsigned d = 0; d < N; ++d)
    if (d != mode) fac[d] = factors[d].data.data();

  std::vector<T> row(R);
  const std::size_t n = x.nnz();
  const Index* out_idx = x.indices[mode].data();
  for (std::size_t m = 0; m < n; ++m) {
    detail::mttkrp_row(x, m, mode, fac.data(), R, row.data());
    T* o = out.data.data() + static_cast<std::size_t>(out_idx[m]) * R;
    for (std::size_t r = 0; r < R; ++r) o[r] += row[r];
  }
  flops::record(static_cast<std::uint64_t>(n) * N * R);
  return out;
}

template SparseTensorCOO<float> tew_eq<float>(const SparseTensorCOO<float>&,
                                              const SparseTensorCOO<float>&, ElemOp);
template SparseTensorCOO<double> tew_eq<double>(const SparseTensorCOO<double>&,
                                                const SparseTensorCOO<double>&, ElemOp);
template SparseTensorCOO<float> tew<float>(SparseTensorCOO<float>&, SparseTensorCOO<float>&,
                                           ElemOp);
template SparseTensorCOO<double> tew<double>(SparseTensorCOO<double>&,
                                             SparseTensorCOO<double>&, ElemOp);
template SparseTensorCOO<float> ts<float>(const SparseTensorCOO<float>&, float, ScalarOp);
template SparseTensorCOO<double> ts<double>(const SparseTensorCOO<double>&, double, ScalarOp);
template SparseTensorCOO<float> ttv<float>(const SparseTensorCOO<float>&,
                                           const DenseVector<float>&, unsigned,
                                           const FiberIndex&);
template SparseTensorCOO<double> ttv<double>(const SparseTensorCOO<double>&,
                                             const DenseVector<double>&, unsigned,
                                             const FiberIndex&);
template SparseTensorCOO<float> ttv<float>(const SparseTensorCOO<float>&,
                                           const DenseVector<float>&, unsigned);
template SparseTensorCOO<double> ttv<double>(const SparseTensorCOO<double>&,
                                             const DenseVector<double>&, unsigned);
template SparseTensorCOO<float> ttm<float>(const SparseTensorCOO<float>&,
                                           const DenseMatrix<float>&, unsigned,
                                           const FiberIndex&);
template SparseTensorCOO<double> ttm<double>(const SparseTensorCOO<double>&,
                                             const DenseMatrix<double>&, unsigned,
                                             const FiberIndex&);
template SparseTensorCOO<float> ttm<float>(const SparseTensorCOO<float>&,
                                           const DenseMatrix<float>&, unsigned);
template SparseTensorCOO<double> ttm<double>(const SparseTensorCOO<double>&,
                                             const DenseMatrix<double>&, unsigned);
template DenseMatrix<float> mttkrp<float>(const SparseTensorCOO<float>&,
                                          const std::vector<DenseMatrix<float>>&, unsigned);
template DenseMatrix<double> mttkrp<double>(const SparseTensorCOO<double>&,
                                            const std::vector<DenseMatrix<double>>&, unsigned);

}  // namespace seq
}  // namespace spten
