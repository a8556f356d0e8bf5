#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <random>
#include <set>
#include <stdexcept>

#include "spten/tensor.hpp"
#include "test_util.hpp"

using namespace spten;
using tu::make_tensor;

TEST_CASE("mode order helpers") {
  CHECK(ascending_order(3) == std::vector<unsigned>{0, 1, 2});
  CHECK(mode_last_order(3, 2) == std::vector<unsigned>{0, 1, 2});
  CHECK(mode_last_order(3, 0) == std::vector<unsigned>{1, 2, 0});
  CHECK(mode_last_order(4, 1) == std::vector<unsigned>{0, 2, 3, 1});
}

TEST_CASE("sort_lexicographic reorders entries under the given key") {
  auto t = make_tensor<float>({2, 2, 2}, {{{1, 0, 0}, 1.f}, {{0, 1, 0}, 2.f}, {{0, 0, 1}, 3.f}});
  auto ord = ascending_order(3);
  sort_lexicographic(t, ord);
  CHECK(tu::entry_tuple(t, 0) == std::vector<Index>{0, 0, 1});
  CHECK(tu::entry_tuple(t, 1) == std::vector<Index>{0, 1, 0});
  CHECK(tu::entry_tuple(t, 2) == std::vector<Index>{1, 0, 0});
  CHECK(t.values == std::vector<float>{3.f, 2.f, 1.f});
  REQUIRE(t.sort_order.has_value());
  CHECK(*t.sort_order == ord);
  validate(t);
}

TEST_CASE("sort_lexicographic single entry is a no-op") {
  auto t = make_tensor<float>({4, 4}, {{{3, 1}, 7.f}});
  auto ord = std::vector<unsigned>{1, 0};
  sort_lexicographic(t, ord);
  CHECK(tu::entry_tuple(t, 0) == std::vector<Index>{3, 1});
  CHECK(t.values[0] == 7.f);
}

TEST_CASE("sort_lexicographic matches a comparison-sort oracle on a random key order") {
  std::mt19937_64 rng(42);
  auto t = tu::random_tensor<float>({5, 6, 4}, 0.45, 17);
  // Scramble storage order first.
  for (std::size_t m = t.nnz(); m > 1; --m) {
    std::size_t j = rng() % m;
    for (auto& ix : t.indices) std::swap(ix[m - 1], ix[j]);
    std::swap(t.values[m - 1], t.values[j]);
  }
  t.sort_order.reset();
  auto before = tu::entry_multiset(t);

  auto ord = std::vector<unsigned>{2, 0, 1};
  sort_lexicographic(t, ord);

  // Independent oracle: comparison sort of (k, i, j) key tuples.
  std::vector<std::array<Index, 3>> keys;
  for (std::size_t m = 0; m < t.nnz(); ++m)
    keys.push_back({t.indices[2][m], t.indices[0][m], t.indices[1][m]});
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(tu::entry_multiset(t) == before);
  validate(t);
}

TEST_CASE("sort_lexicographic is stable across duplicate tuples") {
  auto t = make_tensor<float>({2, 2}, {{{1, 1}, 1.f}, {{0, 0}, 2.f}, {{1, 1}, 3.f}, {{0, 0}, 4.f}});
  auto ord = ascending_order(2);
  sort_lexicographic(t, ord);
  CHECK(t.values == std::vector<float>{2.f, 4.f, 1.f, 3.f});
}

TEST_CASE("sort_lexicographic rejects bad permutations") {
  auto t = make_tensor<float>({2, 2, 2}, {{{0, 0, 0}, 1.f}});
  auto short_ord = std::vector<unsigned>{0, 1};
  auto repeated = std::vector<unsigned>{0, 0, 1};
  CHECK_THROWS_AS(sort_lexicographic(t, short_ord), std::invalid_argument);
  CHECK_THROWS_AS(sort_lexicographic(t, repeated), std::invalid_argument);
}

TEST_CASE("coalesce sums duplicates") {
  auto t = make_tensor<float>({1, 1, 1}, {{{0, 0, 0}, 1.f}, {{0, 0, 0}, 2.f}});
  auto c = coalesce(t);
  REQUIRE(c.nnz() == 1);
  CHECK(c.values[0] == 3.f);
  CHECK(c.coalesced);
  validate(c);
}

TEST_CASE("coalesce of a distinct tensor is an identity on entries") {
  auto t = tu::random_tensor<float>({4, 5, 3}, 0.4, 3);
  sort_lexicographic(t, ascending_order(3));
  auto c = coalesce(t);
  CHECK(bit_identical(c, t));
  CHECK(c.coalesced);
}

TEST_CASE("coalesce equals a dense accumulation oracle") {
  std::mt19937_64 rng(99);
  SparseTensorCOO<double> t({2, 2, 2});
  for (int m = 0; m < 100; ++m) {
    std::vector<Index> idx = {Index(rng() % 2), Index(rng() % 2), Index(rng() % 2)};
    t.push_back(std::span<const Index>(idx), std::uniform_real_distribution<>(-1, 1)(rng));
  }
  auto c = coalesce(t);
  validate(c);

  oracle::DenseTensor dense({2, 2, 2});
  for (std::size_t m = 0; m < t.nnz(); ++m) {
    auto idx = tu::entry_tuple(t, m);
    dense.at(idx) += t.values[m];
  }
  // Every coalesced entry must match the dense cell; cells not present must be
  // covered by the tuple set (8 cells, 100 draws: all present with overwhelming
  // probability, but do not rely on it).
  std::set<std::vector<Index>> seen;
  for (std::size_t m = 0; m < c.nnz(); ++m) {
    auto idx = tu::entry_tuple(c, m);
    CHECK(c.values[m] == doctest::Approx(dense.at(idx)).epsilon(1e-12));
    seen.insert(idx);
  }
  std::vector<Index> idx{0, 0, 0};
  do {
    if (!seen.count(idx)) CHECK(dense.at(idx) == 0.0);
  } while (oracle::next_index(idx, std::span<const Index>(t.dims)));
}

TEST_CASE("coalesce keeps exact-zero sums as stored entries") {
  auto t = make_tensor<float>({2, 2}, {{{1, 0}, 1.f}, {{1, 0}, -1.f}, {{0, 1}, 5.f}});
  auto c = coalesce(t);
  REQUIRE(c.nnz() == 2);
  CHECK(tu::entry_tuple(c, 0) == std::vector<Index>{0, 1});
  CHECK(tu::entry_tuple(c, 1) == std::vector<Index>{1, 0});
  CHECK(c.values[1] == 0.f);
}

TEST_CASE("coalesce preserves an existing sort order") {
  auto t = tu::random_tensor<float>({4, 4, 4}, 0.3, 11);
  auto ord = std::vector<unsigned>{2, 0, 1};
  sort_lexicographic(t, ord);
  auto c = coalesce(t);
  REQUIRE(c.sort_order.has_value());
  CHECK(*c.sort_order == ord);
  validate(c);
}

TEST_CASE("build_fiber_index splits on non-mode index changes") {
  auto t = make_tensor<float>({2, 1, 3}, {{{0, 0, 0}, 1.f}, {{0, 0, 2}, 2.f}, {{1, 0, 1}, 3.f}},
                              true);
  auto fib = build_fiber_index(t, 2);
  CHECK(fib.mode == 2);
  CHECK(fib.nfibs == 2);
  CHECK(fib.fptr == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("build_fiber_index on an empty tensor") {
  SparseTensorCOO<float> t({3, 3});
  t.sort_order = ascending_order(2);
  t.coalesced = true;
  auto fib = build_fiber_index(t, 1);
  CHECK(fib.nfibs == 0);
  CHECK(fib.fptr == std::vector<std::size_t>{0});
}

TEST_CASE("build_fiber_index fiber count matches a hash-set oracle") {
  auto t = tu::random_tensor<float>({8, 8, 8}, 0.1, 123);
  sort_lexicographic(t, mode_last_order(3, 1));
  auto fib = build_fiber_index(t, 1);

  std::set<std::pair<Index, Index>> pairs;
  for (std::size_t m = 0; m < t.nnz(); ++m)
    pairs.insert({t.indices[0][m], t.indices[2][m]});
  CHECK(fib.nfibs == pairs.size());

  // Ranges partition [0, nnz) and each range shares its non-mode indices.
  REQUIRE(fib.fptr.size() == fib.nfibs + 1);
  CHECK(fib.fptr.front() == 0);
  CHECK(fib.fptr.back() == t.nnz());
  for (std::size_t f = 0; f < fib.nfibs; ++f) {
    REQUIRE(fib.fptr[f] < fib.fptr[f + 1]);
    for (std::size_t m = fib.fptr[f] + 1; m < fib.fptr[f + 1]; ++m) {
      CHECK(t.indices[0][m] == t.indices[0][fib.fptr[f]]);
      CHECK(t.indices[2][m] == t.indices[2][fib.fptr[f]]);
    }
  }
}

TEST_CASE("build_fiber_index rejects wrong or missing sort orientation") {
  auto t = tu::random_tensor<float>({4, 4, 4}, 0.2, 5);
  CHECK_THROWS_AS(build_fiber_index(t, 2), std::invalid_argument);  // never sorted
  sort_lexicographic(t, ascending_order(3));
  CHECK_THROWS_AS(build_fiber_index(t, 0), std::invalid_argument);  // mode 0 is not last
  CHECK_NOTHROW(build_fiber_index(t, 2));
}

TEST_CASE("matricize maps a single entry to the documented row linearization") {
  auto t = make_tensor<float>({2, 2, 2}, {{{1, 0, 1}, 5.f}}, true);
  auto m = matricize(t, 2);
  REQUIRE(m.order() == 2);
  CHECK(m.dims == std::vector<Index>{4, 2});
  CHECK(m.indices[0][0] == 2);  // (i=1, j=0) with i slowest over a 2x2 row space
  CHECK(m.indices[1][0] == 1);
  CHECK(m.values[0] == 5.f);
}

TEST_CASE("matricize round-trips through dematricize for every mode") {
  auto t = tu::random_tensor<float>({4, 3, 5}, 0.3, 7);
  sort_lexicographic(t, ascending_order(3));
  t = coalesce(t);
  for (unsigned mode = 0; mode < 3; ++mode) {
    auto m = matricize(t, mode);
    auto back = dematricize(m, t.dims, mode);
    CHECK(back.dims == t.dims);
    CHECK(tu::entry_multiset(back) == tu::entry_multiset(t));
  }
}

TEST_CASE("matricize agrees with the dense reshape oracle") {
  auto t = tu::random_tensor<double>({4, 3, 5}, 0.35, 29);
  sort_lexicographic(t, ascending_order(3));
  t = coalesce(t);
  auto dense = oracle::densify(t);
  for (unsigned mode = 0; mode < 3; ++mode) {
    auto m = matricize(t, mode);
    auto want = oracle::dense_matricize(dense, mode);
    CHECK(m.dims[0] == want.rows);
    CHECK(m.dims[1] == want.cols);
    for (std::size_t e = 0; e < m.nnz(); ++e)
      CHECK(m.values[e] == want(m.indices[0][e], m.indices[1][e]));
    // Entry count preserved, so the map is a bijection onto the non-zeros.
    CHECK(m.nnz() == t.nnz());
  }
}

TEST_CASE("matricize requires a coalesced tensor and rejects row overflow") {
  auto dup = make_tensor<float>({2, 2}, {{{0, 0}, 1.f}, {{0, 0}, 1.f}});
  CHECK_THROWS_AS(matricize(dup, 0), std::invalid_argument);

  SparseTensorCOO<float> big({70000, 70000, 2});
  std::vector<Index> idx{0, 0, 0};
  big.push_back(std::span<const Index>(idx), 1.f);
  big.sort_order = ascending_order(3);
  big.coalesced = true;
  CHECK_THROWS_AS(matricize(big, 2), std::overflow_error);  // 70000^2 rows > 2^32
  CHECK_NOTHROW(matricize(big, 0));                         // 140000 rows is fine
}

TEST_CASE("validate catches structural violations") {
  auto t = tu::random_tensor<float>({4, 4}, 0.4, 1);
  sort_lexicographic(t, ascending_order(2));
  CHECK_NOTHROW(validate(t));

  SUBCASE("index array length mismatch") {
    t.indices[0].pop_back();
    CHECK_THROWS_AS(validate(t), std::logic_error);
  }
  SUBCASE("index out of bounds") {
    t.indices[1][0] = 4;
    CHECK_THROWS_AS(validate(t), std::logic_error);
  }
  SUBCASE("claimed sort order not satisfied") {
    std::swap(t.indices[0].front(), t.indices[0].back());
    std::swap(t.indices[1].front(), t.indices[1].back());
    CHECK_THROWS_AS(validate(t), std::logic_error);
  }
  SUBCASE("claimed coalesced with a duplicate tuple") {
    t.indices[0].push_back(t.indices[0][0]);
    t.indices[1].push_back(t.indices[1][0]);
    t.values.push_back(1.f);
    t.sort_order.reset();
    t.coalesced = true;
    CHECK_THROWS_AS(validate(t), std::logic_error);
  }
}

TEST_CASE("bit_identical distinguishes signed zero, max_rel_diff does not") {
  DenseMatrix<float> a(1, 2), b(1, 2);
  a(0, 0) = 0.0f;
  b(0, 0) = -0.0f;
  a(0, 1) = b(0, 1) = 3.5f;
  CHECK(!bit_identical(a, b));
  CHECK(max_rel_diff(a, b) == 0.0);
  b(0, 0) = 0.0f;
  CHECK(bit_identical(a, b));
  DenseMatrix<float> c(2, 1);
  CHECK(max_rel_diff(a, c) == std::numeric_limits<double>::infinity());
}
