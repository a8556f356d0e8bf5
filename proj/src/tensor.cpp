#include "spten/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace spten {

std::vector<unsigned> ascending_order(unsigned n) {
  std::vector<unsigned> order(n);
  std::iota(order.begin(), order.end(), 0u);
  return order;
}

std::vector<unsigned> mode_last_order(unsigned n, unsigned mode) {
  std::vector<unsigned> order;
  order.reserve(n);
  for (unsigned d = 0; d < n; ++d)
    if (d != mode) order.push_back(d);
  order.push_back(mode);
  return order;
}

namespace {

void check_mode_order(unsigned n, std::span<const unsigned> order) {
  if (order.size() != n)
    throw std::invalid_argument("sort_lexicographic: mode order has wrong length");
  std::vector<bool> seen(n, false);
  for (unsigned d : order) {
    if (d >= n || seen[d])
      throw std::invalid_argument("sort_lexicographic: mode order is not a permutation");
    seen[d] = true;
  }
}

template <typename T>
void gather_entries(SparseTensorCOO<T>& t, const std::vector<std::size_t>& perm) {
  const std::size_t n = perm.size();
  std::vector<Index> ibuf(n);
  for (auto& ix : t.indices) {
    for (std::size_t m = 0; m < n; ++m) ibuf[m] = ix[perm[m]];
    ix.swap(ibuf);
  }
  std::vector<T> vbuf(n);
  for (std::size_t m = 0; m < n; ++m) vbuf[m] = t.values[perm[m]];
  t.values.swap(vbuf);
}

}  // namespace

template <typename T>
void sort_lexicographic(SparseTensorCOO<T>& t, std::span<const unsigned> mode_order) {
  check_mode_order(t.order(), mode_order);
  std::vector<std::size_t> perm(t.nnz());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return compare_entries(t, a, t, b, mode_order) < 0;
  });
  gather_entries(t, perm);
  t.sort_order = std::vector<unsigned>(mode_order.begin(), mode_order.end());
}

template <typename T>
SparseTensorCOO<T> coalesce(const SparseTensorCOO<T>& t) {
  SparseTensorCOO<T> sorted = t;
  if (!sorted.sort_order) {
    const auto order = ascending_order(t.order());
    sort_lexicographic(sorted, order);
  }

  SparseTensorCOO<T> out(t.dims);
  out.sort_order = sorted.sort_order;
  out.coalesced = true;
  const std::span<const unsigned> order(*sorted.sort_order);
  const std::size_t n = sorted.nnz();
  for (std::size_t m = 0; m < n;) {
    std::size_t e = m + 1;
    T acc = sorted.values[m];
    while (e < n && compare_entries(sorted, m, sorted, e, order) == 0) {
      acc += sorted.values[e];
      ++e;
    }
    out.append_entry(sorted, m, acc);
    m = e;
  }
  return out;
}

template <typename T>
FiberIndex build_fiber_index(const SparseTensorCOO<T>& t, unsigned mode) {
  if (mode >= t.order())
    throw std::invalid_argument("build_fiber_index: mode out of range");
  if (!t.sort_order || t.sort_order->back() != mode)
    throw std::invalid_argument(
        "build_fiber_index: tensor must be sorted with the target mode as the last key");

  FiberIndex fib;
  fib.mode = mode;
  const std::size_t n = t.nnz();
  const unsigned N = t.order();
  for (std::size_t m = 0; m < n; ++m) {
    bool boundary = (m == 0);
    if (!boundary) {
      for (unsigned d = 0; d < N; ++d) {
        if (d == mode) continue;
        if (t.indices[d][m] != t.indices[d][m - 1]) {
          boundary = true;
          break;
        }
      }
    }
    if (boundary) fib.fptr.push_back(m);
  }
  fib.fptr.push_back(n);
  fib.nfibs = fib.fptr.size() - 1;
  return fib;
}

template <typename T>
SparseTensorCOO<T> matricize(const SparseTensorCOO<T>& t, unsigned mode) {
  const unsigned N = t.order();
  if (mode >= N) throw std::invalid_argument("matricize: mode out of range");
  if (!t.coalesced) throw std::invalid_argument("matricize: tensor must be coalesced");

  // Row strides over the non-`mode` modes, ascending mode number, first one slowest.
  std::uint64_t rows = 1;
  for (unsigned d = 0; d < N; ++d) {
    if (d == mode) continue;
    rows *= static_cast<std::uint64_t>(t.dims[d]);
    if (rows >= (std::uint64_t{1} << 32))
      throw std::overflow_error("matricize: row space overflows the index type");
  }
  std::vector<std::uint64_t> stride(N, 0);
  std::uint64_t s = 1;
  for (unsigned d = N; d-- > 0;) {
    if (d == mode) continue;
    stride[d] = s;
    s *= t.dims[d];
  }

  SparseTensorCOO<T> out({static_cast<Index>(rows), t.dims[mode]});
  out.reserve(t.nnz());
  const std::size_t n = t.nnz();
  for (std::size_t m = 0; m < n; ++m) {
    std::uint64_t row = 0;
    for (unsigned d = 0; d < N; ++d) {
      if (d == mode) continue;
      row += stride[d] * t.indices[d][m];
    }
    const Index idx[2] = {static_cast<Index>(row), t.indices[mode][m]};
    out.push_back(idx, t.values[m]);
  }
  out.coalesced = true;  // rows are a bijection of the original tuples
  return out;
}

template <typename T>
SparseTensorCOO<T> dematricize(const SparseTensorCOO<T>& m, std::vector<Index> dims,
                               unsigned mode) {
  if (m.order() != 2) throw std::invalid_argument("dematricize: input must be order 2");
  const unsigned N = static_cast<unsigned>(dims.size());
  if (mode >= N) throw std::invalid_argument("dematricize: mode out of range");
  std::uint64_t rows = 1;
  for (unsigned d = 0; d < N; ++d)
    if (d != mode) rows *= static_cast<std::uint64_t>(dims[d]);
  if (m.dims[0] != rows || m.dims[1] != dims[mode])
    throw std::invalid_argument("dematricize: matrix dims do not match target dims");

  SparseTensorCOO<T> out(dims);
  out.reserve(m.nnz());
  out.coalesced = m.coalesced;
  std::vector<Index> idx(N);
  const std::size_t n = m.nnz();
  for (std::size_t e = 0; e < n; ++e) {
    std::uint64_t row = m.indices[0][e];
    for (unsigned d = N; d-- > 0;) {  // peel fastest-varying (highest mode) first
      if (d == mode) continue;
      idx[d] = static_cast<Index>(row % dims[d]);
      row /= dims[d];
    }
    idx[mode] = m.indices[1][e];
    out.push_back(idx, m.values[e]);
  }
  return out;
}

template <typename T>
void validate(const SparseTensorCOO<T>& t) {
  const unsigned N = t.order();
  if (t.indices.size() != N)
    throw std::logic_error("validate: index array count != order");
  const std::size_t n = t.values.size();
  for (unsigned d = 0; d < N; ++d) {
    if (t.indices[d].size() != n)
      throw std::logic_error("validate: index array length != nnz");
    for (std::size_t m = 0; m < n; ++m)
      if (t.indices[d][m] >= t.dims[d])
        throw std::logic_error("validate: index out of bounds in mode " + std::to_string(d));
  }
  if (t.sort_order) {
    check_mode_order(N, *t.sort_order);
    const std::span<const unsigned> order(*t.sort_order);
    for (std::size_t m = 1; m < n; ++m)
      if (compare_entries(t, m - 1, t, m, order) > 0)
        throw std::logic_error("validate: entries violate the recorded sort order");
  }
  if (t.coalesced) {
    if (t.sort_order) {
      const std::span<const unsigned> order(*t.sort_order);
      for (std::size_t m = 1; m < n; ++m)
        if (compare_entries(t, m - 1, t, m, order) == 0)
          throw std::logic_error("validate: duplicate index tuple in coalesced tensor");
    } else {
      std::unordered_set<std::uint64_t> seen;  // hash of tuple; verify on collision
      std::vector<std::size_t> entries;
      entries.reserve(n);
      auto tuple_equal = [&](std::size_t a, std::size_t b) {
        for (unsigned d = 0; d < N; ++d)
          if (t.indices[d][a] != t.indices[d][b]) return false;
        return true;
      };
      for (std::size_t m = 0; m < n; ++m) {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned d = 0; d < N; ++d) {
          h ^= t.indices[d][m];
          h *= 1099511628211ull;
        }
        if (!seen.insert(h).second) {
          for (std::size_t e : entries)
            if (tuple_equal(e, m))
              throw std::logic_error("validate: duplicate index tuple in coalesced tensor");
        }
        entries.push_back(m);
      }
    }
  }
}

template void sort_lexicographic<float>(SparseTensorCOO<float>&, std::span<const unsigned>);
template void sort_lexicographic<double>(SparseTensorCOO<double>&, std::span<const unsigned>);
template SparseTensorCOO<float> coalesce<float>(const SparseTensorCOO<float>&);
template SparseTensorCOO<double> coalesce<double>(const SparseTensorCOO<double>&);
template FiberIndex build_fiber_index<float>(const SparseTensorCOO<float>&, unsigned);
template FiberIndex build_fiber_index<double>(const SparseTensorCOO<double>&, unsigned);
template SparseTensorCOO<float> matricize<float>(const SparseTensorCOO<float>&, unsigned);
template SparseTensorCOO<double> matricize<double>(const SparseTensorCOO<double>&, unsigned);
template SparseTensorCOO<float> dematricize<float>(const SparseTensorCOO<float>&,
                                                   std::vector<Index>, unsigned);
template SparseTensorCOO<double> dematricize<double>(const SparseTensorCOO<double>&,
                                                     std::vector<Index>, unsigned);
template void validate<float>(const SparseTensorCOO<float>&);
template void validate<double>(const SparseTensorCOO<double>&);

}  // namespace spten
