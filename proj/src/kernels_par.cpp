#include "spten/kernels_par.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <stdexcept>

#include "kernel_detail.hpp"
#include "spten/flop_counter.hpp"

namespace spten {
namespace par {

int resolve_threads(int nthreads) {
  return nthreads > 0 ? nthreads : omp_get_max_threads();
}

template <typename T>
SparseTensorCOO<T> tew_eq(const SparseTensorCOO<T>& x, const SparseTensorCOO<T>& y, ElemOp op,
                          int nthreads) {
  if (x.order() != y.order() || x.dims != y.dims)
    throw std::invalid_argument("tew_eq: tensors must have identical dimensions");
  if (x.nnz() != y.nnz())
    throw std::invalid_argument("tew_eq: tensors must have identical nonzero counts");

  const int nt = resolve_threads(nthreads);
  const unsigned N = x.order();
  const std::size_t n = x.nnz();
  SparseTensorCOO<T> z(x.dims);
  z.resize(n);
  z.sort_order = x.sort_order;
  z.coalesced = x.coalesced;

  std::atomic<bool> mismatch{false};
  std::atomic<bool> div_zero{false};

#pragma omp parallel num_threads(nt)
  {
    std::uint64_t fl = 0;
#pragma omp for schedule(static)
    for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(n); ++m) {
      bool ok = true;
      for (unsigned d = 0; d < N; ++d) {
        const Index ix = x.indices[d][m];
        if (ix != y.indices[d][m]) {
          mismatch.store(true, std::memory_order_relaxed);
          ok = false;
        }
        z.indices[d][m] = ix;
      }
      if (op == ElemOp::div && y.values[m] == T(0)) {
        div_zero.store(true, std::memory_order_relaxed);
        ok = false;
      }
      if (ok) {
        z.values[m] = detail::apply_elem(op, x.values[m], y.values[m]);
        ++fl;
      }
    }
    flops::record(fl);
  }

  if (mismatch.load()) throw std::invalid_argument("tew_eq: nonzero patterns differ");
  if (div_zero.load()) throw std::domain_error("tew_eq: division by a stored zero");
  return z;
}

template <typename T>
SparseTensorCOO<T> ts(const SparseTensorCOO<T>& x, T s, ScalarOp op, int nthreads) {
  const int nt = resolve_threads(nthreads);
  const unsigned N = x.order();
  const std::size_t n = x.nnz();
  SparseTensorCOO<T> z(x.dims);
  z.resize(n);
  z.sort_order = x.sort_order;
  z.coalesced = x.coalesced;

#pragma omp parallel num_threads(nt)
  {
    std::uint64_t fl = 0;
#pragma omp for schedule(static)
    for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(n); ++m) {
      for (unsigned d = 0; d < N; ++d) z.indices[d][m] = x.indices[d][m];
      z.values[m] = detail::apply_scalar(op, x.values[m], s);
      ++fl;
    }
    flops::record(fl);
  }
  return z;
}

template <typename T>
SlicePartition partition_for_tew(const SparseTensorCOO<T>& x, const SparseTensorCOO<T>& y,
                                 int nthreads) {
  detail::check_tew_inputs(x, y, ElemOp::add);
  if (!x.sort_order || !y.sort_order || *x.sort_order != *y.sort_order)
    throw std::invalid_argument("partition_for_tew: tensors must share a sort order");
  const int nt = resolve_threads(nthreads);

  SlicePartition part;
  part.mode = x.sort_order->front();
  const Index nslices = std::max(x.dims[part.mode], y.dims[part.mode]);
  const Index* xs = x.indices[part.mode].data();
  const std::size_t xn = x.nnz();

  part.boundaries.push_back(0);
  std::size_t remaining = xn;
  int parts_left = nt;
  double target = parts_left > 0 ? static_cast<double>(remaining) / parts_left : 0.0;
  std::size_t acc = 0;

  // Walk x's slice runs (x is sorted with part.mode as the leading key).
  std::size_t m = 0;
  while (m < xn) {
    const Index slice = xs[m];
    std::size_t e = m;
    while (e < xn && xs[e] == slice) ++e;
    const std::size_t run = e - m;
    acc += run;
    remaining -= run;
    if (parts_left > 1 && static_cast<double>(acc) >= target && slice + 1 < nslices) {
      part.boundaries.push_back(slice + 1);
      --parts_left;
      target = static_cast<double>(remaining) / parts_left;
      acc = 0;
    }
    m = e;
  }
  part.boundaries.push_back(nslices);

  // Entry ranges per partition via binary search on each tensor's leading mode.
  auto fill_ranges = [&](const SparseTensorCOO<T>& t, std::vector<std::size_t>& out) {
    const auto& col = t.indices[part.mode];
    out.reserve(part.boundaries.size());
    for (Index b : part.boundaries)
      out.push_back(std::lower_bound(col.begin(), col.end(), b) - col.begin());
  };
  fill_ranges(x, part.x_range);
  fill_ranges(y, part.y_range);
  return part;
}

template <typename T>
SparseTensorCOO<T> tew(SparseTensorCOO<T>& x, SparseTensorCOO<T>& y, ElemOp op, int nthreads) {
  detail::check_tew_inputs(x, y, op);
  const auto order = detail::unify_tew_sort(x, y);
  const int nt = resolve_threads(nthreads);
  const SlicePartition part = partition_for_tew(x, y, nt);
  const std::size_t P = part.parts();

  const auto out_dims = detail::tew_output_dims(x, y);
  std::vector<SparseTensorCOO<T>> locals(P, SparseTensorCOO<T>(out_dims));

#pragma omp parallel num_threads(nt)
  {
    std::uint64_t fl = 0;
#pragma omp for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(P); ++p)
      fl += detail::merge_range(x, part.x_range[p], part.x_range[p + 1], y, part.y_range[p],
                                part.y_range[p + 1], order, op, locals[p]);
    flops::record(fl);
  }

  SparseTensorCOO<T> z(out_dims);
  std::size_t total = 0;
  for (const auto& l : locals) total += l.nnz();
  z.reserve(total);
  for (auto& l : locals) {
    for (unsigned d = 0; d < z.order(); ++d)
      z.indices[d].insert(z.indices[d].end(), l.indices[d].begin(), l.indices[d].end());
    z.values.insert(z.values.end(), l.values.begin(), l.values.end());
  }
  z.sort_order = order;
  z.coalesced = true;
  return z;
}

template <typename T>
SparseTensorCOO<T> ttv(const SparseTensorCOO<T>& x, const DenseVector<T>& v, unsigned mode,
                       const FiberIndex& fib, int nthreads) {
  detail::check_fiber_kernel_inputs(x, mode, fib, "ttv");
  if (v.len() != x.dims[mode])
    throw std::invalid_argument("ttv: vector length must match the mode dimension");

  const int nt = resolve_threads(nthreads);
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

#pragma omp parallel num_threads(nt)
  {
    std::uint64_t fl = 0;
#pragma omp for schedule(static)
    for (std::ptrdiff_t f = 0; f < static_cast<std::ptrdiff_t>(fib.nfibs); ++f) {
      const std::size_t b = fib.fptr[f], e = fib.fptr[f + 1];
      unsigned dz = 0;
      for (unsigned d = 0; d < N; ++d)
        if (d != mode) z.indices[dz++][f] = x.indices[d][b];
      z.values[f] = detail::ttv_fiber_value(mode_idx, vals, vp, b, e);
      fl += 2 * (e - b);
    }
    flops::record(fl);
  }
  z.sort_order = detail::drop_mode(*x.sort_order, mode);
  z.coalesced = true;
  return z;
}

template <typename T>
SparseTensorCOO<T> ttv(const SparseTensorCOO<T>& x, const DenseVector<T>& v, unsigned mode,
                       int nthreads) {
  return ttv(x, v, mode, build_fiber_index(x, mode), nthreads);
}

template <typename T>
SparseTensorCOO<T> ttm(const SparseTensorCOO<T>& x, const DenseMatrix<T>& u, unsigned mode,
                       const FiberIndex& fib, int nthreads) {
  detail::check_fiber_kernel_inputs(x, mode, fib, "ttm");
  if (u.rows != x.dims[mode])
    throw std::invalid_argument("ttm: matrix rows must match the mode dimension");
  const std::size_t R = u.cols;
  if (R == 0) throw std::invalid_argument("ttm: matrix must have at least one column");

  const int nt = resolve_threads(nthreads);
  const unsigned N = x.order();
  std::vector<Index> out_dims = x.dims;
  out_dims[mode] = static_cast<Index>(R);

  SparseTensorCOO<T> z(std::move(out_dims));
  z.resize(fib.nfibs * R);
  const Index* mode_idx = x.indices[mode].data();
  const T* vals = x.values.data();
  const T* up = u.data.data();

#pragma omp parallel num_threads(nt)
  {
    std::uint64_t fl = 0;
#pragma omp for schedule(static)
    for (std::ptrdiff_t f = 0; f < static_cast<std::ptrdiff_t>(fib.nfibs); ++f) {
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
    flops::record(fl);
  }
  z.sort_order = x.sort_order;
  z.coalesced = true;
  return z;
}

template <typename T>
SparseTensorCOO<T> ttm(const SparseTensorCOO<T>& x, const DenseMatrix<T>& u, unsigned mode,
                       int nthreads) {
  return ttm(x, u, mode, build_fiber_index(x, mode), nthreads);
}

template <typename T>
DenseMatrix<T> mttkrp(const SparseTensorCOO<T>& x, const std::vector<DenseMatrix<T>>& factors,
                      unsigned mode, int nthreads, MttkrpStrategy strategy) {
  const std::size_t R = detail::check_mttkrp_inputs(x, factors, mode);
  const int nt = resolve_threads(nthreads);
  const unsigned N = x.order();
  const std::size_t I = x.dims[mode];
  const std::size_t n = x.nnz();

  DenseMatrix<T> out(I, R);
  std::vector<const T*> fac(N, nullptr);
  for (unsigned d = 0; d < N; ++d)
    if (d != mode) fac[d] = factors[d].data.data();
  const Index* out_idx = x.indices[mode].data();

  if (strategy == MttkrpStrategy::privatize) {
    std::vector<std::vector<T>> bufs(nt);
#pragma omp parallel num_threads(nt)
    {
      const int tid = omp_get_thread_num();
      bufs[tid].assign(I * R, T(0));
      T* buf = bufs[tid].data();
      std::vector<T> row(R);
      std::uint64_t fl = 0;
#pragma omp for schedule(static)
      for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(n); ++m) {
        detail::mttkrp_row(x, m, mode, fac.data(), R, row.data());
        T* o = buf + static_cast<std::size_t>(out_idx[m]) * R;
        for (std::size_t r = 0; r < R; ++r) o[r] += row[r];
        fl += static_cast<std::uint64_t>(N) * R;
      }
      // The implied barrier above makes every buffer complete; reduce them into
      // the output, parallel over rows.
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(I); ++i) {
        T* o = out.data.data() + static_cast<std::size_t>(i) * R;
        for (const auto& b : bufs) {
          if (b.empty()) continue;
          const T* src = b.data() + static_cast<std::size_t>(i) * R;
          for (std::size_t r = 0; r < R; ++r) o[r] += src[r];
          fl += R;
        }
      }
      flops::record(fl);
    }
  } else {
#pragma omp parallel num_threads(nt)
    {
      std::vector<T> row(R);
#pragma omp for schedule(static)
      for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(n); ++m) {
        detail::mttkrp_row(x, m, mode, fac.data(), R, row.data());
        T* o = out.data.data() + static_cast<std::size_t>(out_idx[m]) * R;
        for (std::size_t r = 0; r < R; ++r) {
#pragma omp atomic
          o[r] += row[r];
        }
      }
    }
    flops::record(static_cast<std::uint64_t>(n) * N * R);
  }
  return out;
}

template SparseTensorCOO<float> tew_eq<float>(const SparseTensorCOO<float>&,
                                              const SparseTensorCOO<float>&, ElemOp, int);
template SparseTensorCOO<double> tew_eq<double>(const SparseTensorCOO<double>&,
                                                const SparseTensorCOO<double>&, ElemOp, int);
template SlicePartition partition_for_tew<float>(const SparseTensorCOO<float>&,
                                                 const SparseTensorCOO<float>&, int);
template SlicePartition partition_for_tew<double>(const SparseTensorCOO<double>&,
                                                  const SparseTensorCOO<double>&, int);
template SparseTensorCOO<float> tew<float>(SparseTensorCOO<float>&, SparseTensorCOO<float>&,
                                           ElemOp, int);
template SparseTensorCOO<double> tew<double>(SparseTensorCOO<double>&,
                                             SparseTensorCOO<double>&, ElemOp, int);
template SparseTensorCOO<float> ts<float>(const SparseTensorCOO<float>&, float, ScalarOp, int);
template SparseTensorCOO<double> ts<double>(const SparseTensorCOO<double>&, double, ScalarOp,
                                            int);
template SparseTensorCOO<float> ttv<float>(const SparseTensorCOO<float>&,
                                           const DenseVector<float>&, unsigned,
                                           const FiberIndex&, int);
template SparseTensorCOO<double> ttv<double>(const SparseTensorCOO<double>&,
                                             const DenseVector<double>&, unsigned,
                                             const FiberIndex&, int);
template SparseTensorCOO<float> ttv<float>(const SparseTensorCOO<float>&,
                                           const DenseVector<float>&, unsigned, int);
template SparseTensorCOO<double> ttv<double>(const SparseTensorCOO<double>&,
                                             const DenseVector<double>&, unsigned, int);
template SparseTensorCOO<float> ttm<float>(const SparseTensorCOO<float>&,
                                           const DenseMatrix<float>&, unsigned,
                                           const FiberIndex&, int);
template SparseTensorCOO<double> ttm<double>(const SparseTensorCOO<double>&,
                                             const DenseMatrix<double>&, unsigned,
                                             const FiberIndex&, int);
template SparseTensorCOO<float> ttm<float>(const SparseTensorCOO<float>&,
                                           const DenseMatrix<float>&, unsigned, int);
template SparseTensorCOO<double> ttm<double>(const SparseTensorCOO<double>&,
                                             const DenseMatrix<double>&, unsigned, int);
template DenseMatrix<float> mttkrp<float>(const SparseTensorCOO<float>&,
                                          const std::vector<DenseMatrix<float>>&, unsigned,
                                          int, MttkrpStrategy);
template DenseMatrix<double> mttkrp<double>(const SparseTensorCOO<double>&,
                                            const std::vector<DenseMatrix<double>>&, unsigned,
                                            int, MttkrpStrategy);

}  // namespace par
}  // namespace spten
