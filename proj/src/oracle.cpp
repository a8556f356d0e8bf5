#include "spten/oracle.hpp"

#include <stdexcept>

namespace spten::oracle {

namespace {

std::size_t checked_size(std::span<const Index> dims) {
  std::size_t n = 1;
  for (Index d : dims) {
    if (d == 0) return 0;
    if (n > kMaxDenseElems / d)
      throw std::length_error("oracle: dense size guard exceeded");
    n *= d;
  }
  return n;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<Index> d) : dims(std::move(d)) {
  data.assign(checked_size(dims), 0.0);
}

std::size_t DenseTensor::linear(std::span<const Index> idx) const {
  std::size_t lin = 0;
  for (std::size_t d = 0; d < dims.size(); ++d) lin = lin * dims[d] + idx[d];
  return lin;
}

bool next_index(std::vector<Index>& idx, std::span<const Index> dims) {
  for (std::size_t d = dims.size(); d-- > 0;) {
    if (++idx[d] < dims[d]) return true;
    idx[d] = 0;
  }
  return false;
}

template <typename T>
DenseTensor densify(const SparseTensorCOO<T>& t, std::vector<Index> dims) {
  if (dims.size() != t.order())
    throw std::invalid_argument("densify: dims order mismatch");
  for (unsigned d = 0; d < t.order(); ++d)
    if (dims[d] < t.dims[d]) throw std::invalid_argument("densify: dims must cover t.dims");
  DenseTensor out(std::move(dims));
  const unsigned N = t.order();
  std::vector<Index> idx(N);
  for (std::size_t m = 0; m < t.nnz(); ++m) {
    for (unsigned d = 0; d < N; ++d) idx[d] = t.indices[d][m];
    out.at(idx) += static_cast<double>(t.values[m]);
  }
  return out;
}

template <typename T>
DenseTensor densify(const SparseTensorCOO<T>& t) {
  return densify(t, t.dims);
}

SparseTensorCOO<double> sparsify(const DenseTensor& d) {
  SparseTensorCOO<double> out(d.dims);
  const unsigned N = static_cast<unsigned>(d.dims.size());
  std::vector<Index> idx(N, 0);
  if (d.size() != 0) {
    std::size_t lin = 0;
    do {
      if (d.data[lin] != 0.0) out.push_back(idx, d.data[lin]);
      ++lin;
    } while (next_index(idx, d.dims));
  }
  out.sort_order = ascending_order(N);
  out.coalesced = true;
  return out;
}

template <typename T>
DenseMatrix<double> widen(const DenseMatrix<T>& m) {
  DenseMatrix<double> out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = static_cast<double>(m.data[i]);
  return out;
}

template <typename T>
std::vector<double> widen(const std::vector<T>& v) {
  return std::vector<double>(v.begin(), v.end());
}

DenseTensor dense_tew(const DenseTensor& x, const DenseTensor& y, ElemOp op) {
  if (x.dims != y.dims) throw std::invalid_argument("dense_tew: dims mismatch");
  DenseTensor out(x.dims);
  for (std::size_t i = 0; i < x.size(); ++i) {
    switch (op) {
      case ElemOp::add: out.data[i] = x.data[i] + y.data[i]; break;
      case ElemOp::sub: out.data[i] = x.data[i] - y.data[i]; break;
      case ElemOp::mul: out.data[i] = x.data[i] * y.data[i]; break;
      default: out.data[i] = x.data[i] / y.data[i]; break;
    }
  }
  return out;
}

DenseTensor dense_ts(const DenseTensor& x, double s, ScalarOp op) {
  DenseTensor out(x.dims);
  for (std::size_t i = 0; i < x.size(); ++i)
    out.data[i] = op == ScalarOp::add ? x.data[i] + s : x.data[i] * s;
  return out;
}

namespace {

std::vector<Index> drop_dim(const std::vector<Index>& dims, unsigned mode) {
  std::vector<Index> out;
  out.reserve(dims.size() - 1);
  for (unsigned d = 0; d < dims.size(); ++d)
    if (d != mode) out.push_back(dims[d]);
  return out;
}

}  // namespace

DenseTensor dense_ttv(const DenseTensor& x, std::span<const double> v, unsigned mode) {
  const unsigned N = static_cast<unsigned>(x.dims.size());
  if (mode >= N) throw std::invalid_argument("dense_ttv: mode out of range");
  if (v.size() != x.dims[mode]) throw std::invalid_argument("dense_ttv: vector length mismatch");
  DenseTensor out(drop_dim(x.dims, mode));
  if (x.size() == 0) return out;

  std::vector<Index> idx(N, 0), oidx(N - 1);
  std::size_t lin = 0;
  do {
    unsigned k = 0;
    for (unsigned d = 0; d < N; ++d)
      if (d != mode) oidx[k++] = idx[d];
    out.at(oidx) += x.data[lin] * v[idx[mode]];
    ++lin;
  } while (next_index(idx, x.dims));
  return out;
}

DenseTensor dense_ttm(const DenseTensor& x, const DenseMatrix<double>& u, unsigned mode) {
  const unsigned N = static_cast<unsigned>(x.dims.size());
  if (mode >= N) throw std::invalid_argument("dense_ttm: mode out of range");
  if (u.rows != x.dims[mode]) throw std::invalid_argument("dense_ttm: matrix rows mismatch");
  std::vector<Index> odims = x.dims;
  odims[mode] = static_cast<Index>(u.cols);
  DenseTensor out(std::move(odims));
  if (x.size() == 0) return out;

  std::vector<Index> idx(N, 0), oidx(N);
  std::size_t lin = 0;
  do {
    oidx = idx;
    for (std::size_t r = 0; r < u.cols; ++r) {
      oidx[mode] = static_cast<Index>(r);
      out.at(oidx) += x.data[lin] * u(idx[mode], r);
    }
    ++lin;
  } while (next_index(idx, x.dims));
  return out;
}

DenseMatrix<double> dense_mttkrp(const DenseTensor& x,
                                 const std::vector<DenseMatrix<double>>& factors,
                                 unsigned mode) {
  const unsigned N = static_cast<unsigned>(x.dims.size());
  if (mode >= N) throw std::invalid_argument("dense_mttkrp: mode out of range");
  if (factors.size() != N) throw std::invalid_argument("dense_mttkrp: need a factor per mode");
  std::size_t R = 0;
  for (unsigned d = 0; d < N; ++d) {
    if (d == mode) continue;
    if (R == 0) R = factors[d].cols;
    if (factors[d].cols != R || factors[d].rows != x.dims[d])
      throw std::invalid_argument("dense_mttkrp: factor shape mismatch");
  }
  DenseMatrix<double> out(x.dims[mode], R);
  if (x.size() == 0) return out;

  std::vector<Index> idx(N, 0);
  std::size_t lin = 0;
  do {
    const double val = x.data[lin];
    for (std::size_t r = 0; r < R; ++r) {
      double p = val;
      for (unsigned d = 0; d < N; ++d)
        if (d != mode) p *= factors[d](idx[d], r);
      out(idx[mode], r) += p;
    }
    ++lin;
  } while (next_index(idx, x.dims));
  return out;
}

DenseMatrix<double> matmul(const DenseMatrix<double>& a, const DenseMatrix<double>& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dims mismatch");
  DenseMatrix<double> out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

DenseMatrix<double> kronecker(const DenseMatrix<double>& a, const DenseMatrix<double>& b) {
  DenseMatrix<double> out(a.rows * b.rows, a.cols * b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      for (std::size_t k = 0; k < b.rows; ++k)
        for (std::size_t l = 0; l < b.cols; ++l)
          out(i * b.rows + k, j * b.cols + l) = a(i, j) * b(k, l);
  return out;
}

DenseMatrix<double> khatri_rao(const DenseMatrix<double>& a, const DenseMatrix<double>& b) {
  if (a.cols != b.cols) throw std::invalid_argument("khatri_rao: column counts must match");
  DenseMatrix<double> out(a.rows * b.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < b.rows; ++k)
      for (std::size_t r = 0; r < a.cols; ++r)
        out(i * b.rows + k, r) = a(i, r) * b(k, r);
  return out;
}

DenseMatrix<double> dense_matricize(const DenseTensor& x, unsigned mode) {
  const unsigned N = static_cast<unsigned>(x.dims.size());
  if (mode >= N) throw std::invalid_argument("dense_matricize: mode out of range");
  std::size_t rows = 1;
  for (unsigned d = 0; d < N; ++d)
    if (d != mode) rows *= x.dims[d];
  DenseMatrix<double> out(rows, x.dims[mode]);
  if (x.size() == 0) return out;

  std::vector<Index> idx(N, 0);
  std::size_t lin = 0;
  do {
    std::size_t row = 0;
    for (unsigned d = 0; d < N; ++d)
      if (d != mode) row = row * x.dims[d] + idx[d];
    out(row, idx[mode]) = x.data[lin];
    ++lin;
  } while (next_index(idx, x.dims));
  return out;
}

DenseTensor dense_tensorize(const DenseMatrix<double>& m, std::vector<Index> dims,
                            unsigned mode) {
  const unsigned N = static_cast<unsigned>(dims.size());
  if (mode >= N) throw std::invalid_argument("dense_tensorize: mode out of range");
  std::size_t rows = 1;
  for (unsigned d = 0; d < N; ++d)
    if (d != mode) rows *= dims[d];
  if (m.rows != rows || m.cols != dims[mode])
    throw std::invalid_argument("dense_tensorize: matrix shape does not match dims");
  DenseTensor out(std::move(dims));
  if (out.size() == 0) return out;

  std::vector<Index> idx(N, 0);
  std::size_t lin = 0;
  do {
    std::size_t row = 0;
    for (unsigned d = 0; d < N; ++d)
      if (d != mode) row = row * out.dims[d] + idx[d];
    out.data[lin] = m(row, idx[mode]);
    ++lin;
  } while (next_index(idx, out.dims));
  return out;
}

DenseTensor ttm_via_matricization(const DenseTensor& x, const DenseMatrix<double>& u,
                                  unsigned mode) {
  const DenseMatrix<double> unfolded = dense_matricize(x, mode);
  const DenseMatrix<double> product = matmul(unfolded, u);
  std::vector<Index> odims = x.dims;
  odims[mode] = static_cast<Index>(u.cols);
  return dense_tensorize(product, std::move(odims), mode);
}

DenseMatrix<double> mttkrp_via_khatri_rao(const DenseTensor& x,
                                          const std::vector<DenseMatrix<double>>& factors,
                                          unsigned mode) {
  const unsigned N = static_cast<unsigned>(x.dims.size());
  if (mode >= N) throw std::invalid_argument("mttkrp_via_khatri_rao: mode out of range");
  if (factors.size() != N)
    throw std::invalid_argument("mttkrp_via_khatri_rao: need a factor per mode");

  DenseMatrix<double> kr;
  bool first = true;
  for (unsigned d = 0; d < N; ++d) {
    if (d == mode) continue;
    kr = first ? factors[d] : khatri_rao(kr, factors[d]);
    first = false;
  }
  if (first) throw std::invalid_argument("mttkrp_via_khatri_rao: order must be >= 2");

  const DenseMatrix<double> unfolded = dense_matricize(x, mode);  // (prod others) x I_mode
  DenseMatrix<double> out(x.dims[mode], kr.cols);
  for (std::size_t c = 0; c < out.rows; ++c)
    for (std::size_t r = 0; r < out.cols; ++r) {
      double acc = 0.0;
      for (std::size_t row = 0; row < unfolded.rows; ++row)
        acc += unfolded(row, c) * kr(row, r);
      out(c, r) = acc;
    }
  return out;
}

template DenseTensor densify<float>(const SparseTensorCOO<float>&);
template DenseTensor densify<double>(const SparseTensorCOO<double>&);
template DenseTensor densify<float>(const SparseTensorCOO<float>&, std::vector<Index>);
template DenseTensor densify<double>(const SparseTensorCOO<double>&, std::vector<Index>);
template DenseMatrix<double> widen<float>(const DenseMatrix<float>&);
template DenseMatrix<double> widen<double>(const DenseMatrix<double>&);
template std::vector<double> widen<float>(const std::vector<float>&);
template std::vector<double> widen<double>(const std::vector<double>&);

}  // namespace spten::oracle
