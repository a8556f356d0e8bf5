#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include "spten/io.hpp"
#include "test_util.hpp"

using namespace spten;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("spten_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_text(const TempDir& dir, const std::string& name, const std::string& body) {
  auto p = dir.file(name);
  std::ofstream out(p);
  out << body;
  return p;
}

}  // namespace

TEST_CASE("read_tns parses 1-based entries") {
  TempDir dir;
  auto p = write_text(dir, "basic.tns",
                      "# a comment\n"
                      "\n"
                      "1 2 3 4.5\n"
                      "2 1 1 -1.25\n");
  auto t = read_tns<float>(p);
  REQUIRE(t.order() == 3);
  REQUIRE(t.nnz() == 2);
  CHECK(tu::entry_tuple(t, 0) == std::vector<Index>{0, 1, 2});
  CHECK(t.values[0] == 4.5f);
  CHECK(tu::entry_tuple(t, 1) == std::vector<Index>{1, 0, 0});
  CHECK(t.values[1] == -1.25f);
  CHECK(t.dims == std::vector<Index>{2, 2, 3});  // per-mode maxima
  CHECK(!t.coalesced);
  CHECK(!t.sort_order.has_value());
}

TEST_CASE("read_tns honors a dims override, including empty trailing slices") {
  TempDir dir;
  auto p = write_text(dir, "padded.tns", "1 1 1 2.0\n2 2 2 3.0\n");
  auto t = read_tns<double>(p, std::vector<Index>{4, 4, 4});
  CHECK(t.dims == std::vector<Index>{4, 4, 4});

  // Entries beyond the override are rejected with the offending line.
  auto q = write_text(dir, "outside.tns", "1 1 1 2.0\n5 1 1 3.0\n");
  try {
    read_tns<double>(q, std::vector<Index>{4, 4, 4});
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("read_tns of a comment-only file needs a dims override") {
  TempDir dir;
  auto p = write_text(dir, "comments.tns", "# nothing\n# here\n");
  CHECK_THROWS_AS(read_tns<float>(p), std::runtime_error);
  auto t = read_tns<float>(p, std::vector<Index>{3, 2});
  CHECK(t.order() == 2);
  CHECK(t.nnz() == 0);
  CHECK(t.dims == std::vector<Index>{3, 2});
}

TEST_CASE("write/read round-trip preserves entries and bit-exact values") {
  TempDir dir;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto t = tu::random_tensor<double>({6, 5, 7}, 0.25, seed, -2.0, 2.0);
    t.values[0] = 1.0 / 3.0;
    t.values[1] = 1e-300;
    t.values[2] = 0.0;
    auto p = dir.file("rt" + std::to_string(seed) + ".tns");
    write_tns(t, p);
    auto back = read_tns<double>(p, t.dims);
    REQUIRE(back.nnz() == t.nnz());
    CHECK(back.dims == t.dims);
    for (std::size_t m = 0; m < t.nnz(); ++m) {
      CHECK(tu::entry_tuple(back, m) == tu::entry_tuple(t, m));
      CHECK(detail::value_bits(back.values[m]) == detail::value_bits(t.values[m]));
    }
  }

  auto tf = tu::random_tensor<float>({9, 4}, 0.5, 8, 0.1f, 100.f);
  auto p = dir.file("rt_f32.tns");
  write_tns(tf, p);
  auto backf = read_tns<float>(p);
  REQUIRE(backf.nnz() == tf.nnz());
  for (std::size_t m = 0; m < tf.nnz(); ++m)
    CHECK(detail::value_bits(backf.values[m]) == detail::value_bits(tf.values[m]));
}

TEST_CASE("write_tns emits one entry per line with single spaces") {
  TempDir dir;
  auto t = tu::make_tensor<float>({2, 3}, {{{1, 2}, 0.5f}});
  auto p = dir.file("fmt.tns");
  write_tns(t, p);
  std::ifstream in(p);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "2 3 0.5");
  CHECK(!std::getline(in, line));

  SparseTensorCOO<float> empty({2, 2});
  auto q = dir.file("empty.tns");
  write_tns(empty, q);
  std::ifstream in2(q);
  CHECK(!std::getline(in2, line));
}

TEST_CASE("read_tns rejects malformed lines with line numbers") {
  TempDir dir;
  const std::pair<const char*, const char*> cases[] = {
      {"short.tns", "1 2 3 1.0\n1 2 1.0\n"},
      {"long.tns", "1 2 3 1.0\n1 2 3 4 1.0\n"},
      {"alpha_index.tns", "1 2 3 1.0\nx 2 3 1.0\n"},
      {"zero_index.tns", "1 2 3 1.0\n0 2 3 1.0\n"},
      {"negative_index.tns", "1 2 3 1.0\n-1 2 3 1.0\n"},
      {"huge_index.tns", "1 2 3 1.0\n5000000000 2 3 1.0\n"},
      {"missing_value.tns", "1 2 3 1.0\n1 2 3\n"},
      {"bad_value.tns", "1 2 3 1.0\n1 2 3 4..5\n"},
      {"value_overflow.tns", "1 2 3 1.0\n1 2 3 1e999\n"},
      {"double_dash.tns", "1 2 3 1.0\n1 2 3 --4\n"},
  };
  for (auto [name, body] : cases) {
    auto p = write_text(dir, name, body);
    try {
      read_tns<float>(p);
      FAIL("expected a parse error for ", name);
    } catch (const std::runtime_error& e) {
      INFO(name, ": ", e.what());
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
  }
}

TEST_CASE("gen_synthetic is deterministic and produces distinct tuples") {
  auto a = gen_synthetic<float>({10, 12, 8}, 300, 42);
  auto b = gen_synthetic<float>({10, 12, 8}, 300, 42);
  CHECK(bit_identical(a, b));
  auto c = gen_synthetic<float>({10, 12, 8}, 300, 43);
  CHECK(!bit_identical(a, c));

  CHECK(a.coalesced);
  std::set<std::vector<Index>> tuples;
  for (std::size_t m = 0; m < a.nnz(); ++m) {
    tuples.insert(tu::entry_tuple(a, m));
    CHECK(a.values[m] >= 1.0f);
    CHECK(a.values[m] < 2.0f);
  }
  CHECK(tuples.size() == a.nnz());
}

TEST_CASE("gen_synthetic at full density covers the whole index space") {
  auto t = gen_synthetic<float>({4, 4, 3}, 48, 7);
  REQUIRE(t.nnz() == 48);
  std::set<std::vector<Index>> tuples;
  for (std::size_t m = 0; m < 48; ++m) tuples.insert(tu::entry_tuple(t, m));
  CHECK(tuples.size() == 48);
  for (const auto& tup : tuples) {
    CHECK(tup[0] < 4);
    CHECK(tup[1] < 4);
    CHECK(tup[2] < 3);
  }
}

TEST_CASE("gen_synthetic rejects infeasible requests") {
  CHECK_THROWS_AS(gen_synthetic<float>({4, 4, 3}, 49, 7), std::invalid_argument);
  // Skew that overflows the target slice: slice 0 holds 8*8 = 64 tuples but
  // 0.9 * 1000 = 900 are requested.
  CHECK_THROWS_AS(gen_synthetic<float>({64, 8, 8}, 1000, 7, SyntheticDist::slice_skewed, 0.9),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_synthetic<float>({8, 8}, 10, 7, SyntheticDist::slice_skewed, 1.5),
                  std::invalid_argument);
}

TEST_CASE("gen_synthetic slice_skewed concentrates the requested fraction in slice 0") {
  auto t = gen_synthetic<float>({64, 32, 32}, 1000, 11, SyntheticDist::slice_skewed, 0.9);
  REQUIRE(t.nnz() == 1000);
  std::size_t in_slice0 = 0;
  for (std::size_t m = 0; m < t.nnz(); ++m)
    if (t.indices[0][m] == 0) ++in_slice0;
  CHECK(in_slice0 == 900);
  std::set<std::vector<Index>> tuples;
  for (std::size_t m = 0; m < t.nnz(); ++m) tuples.insert(tu::entry_tuple(t, m));
  CHECK(tuples.size() == t.nnz());
}

TEST_CASE("manifest round-trip and lookup") {
  TempDir dir;
  std::vector<ManifestEntry> entries(2);
  entries[0].name = "alpha";
  entries[0].order = 3;
  entries[0].dims = {100, 200, 300};
  entries[0].nnz = 60000;
  entries[0].density = 0.01;
  entries[0].source = "http://example.com/alpha.tns";
  entries[1].name = "beta";
  entries[1].order = 2;
  entries[1].dims = {50, 40};
  entries[1].nnz = 1000;
  entries[1].density = 0.5;
  entries[1].checksum = "sha256:abc123";

  auto p = dir.file("sets.manifest");
  write_manifest(entries, p);
  auto back = read_manifest(p);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == entries[0]);
  CHECK(back[1] == entries[1]);

  CHECK(find_entry(back, "beta") == &back[1]);
  CHECK(find_entry(back, "gamma") == nullptr);
}

TEST_CASE("manifest validation failures carry line numbers") {
  TempDir dir;
  auto check_fails = [&](const char* name, const std::string& body, const char* needle) {
    auto p = write_text(dir, name, body);
    try {
      read_manifest(p);
      FAIL("expected a manifest error for ", name);
    } catch (const std::runtime_error& e) {
      INFO(name, ": ", e.what());
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  check_fails("density.manifest",
              "tensor: t\norder: 2\ndims: 10 10\nnnz: 50\ndensity: 0.9\n", "density");
  check_fails("order.manifest",
              "tensor: t\norder: 3\ndims: 10 10\nnnz: 50\ndensity: 0.5\n", "order");
  check_fails("unknown_key.manifest",
              "tensor: t\norder: 2\ndims: 10 10\nnnz: 50\ndensity: 0.5\ncolor: red\n",
              ":6:");
  check_fails("missing_field.manifest", "tensor: t\norder: 2\ndims: 10 10\n", "nnz");
  check_fails("duplicate.manifest",
              "tensor: t\norder: 2\ndims: 10 10\nnnz: 50\ndensity: 0.5\n\n"
              "tensor: t\norder: 2\ndims: 10 10\nnnz: 50\ndensity: 0.5\n",
              "duplicate");
}

TEST_CASE("manifest density tolerance is five percent") {
  TempDir dir;
  // true density = 50/100 = 0.5; 0.52 is within 5%, 0.54 is not.
  auto ok = write_text(dir, "ok.manifest",
                       "tensor: t\norder: 2\ndims: 10 10\nnnz: 50\ndensity: 0.52\n");
  CHECK_NOTHROW(read_manifest(ok));
  auto bad = write_text(dir, "bad.manifest",
                        "tensor: t\norder: 2\ndims: 10 10\nnnz: 50\ndensity: 0.54\n");
  CHECK_THROWS_AS(read_manifest(bad), std::runtime_error);
}
