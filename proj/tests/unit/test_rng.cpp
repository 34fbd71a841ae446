#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "heartsiam/rng.hpp"

using namespace heartsiam;

TEST_CASE("counter rng is reproducible per key") {
  rng::Counter a(rng::chain(42, "block"));
  rng::Counter b(rng::chain(42, "block"));
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct keys give distinct streams") {
  rng::Counter a(rng::chain(42, 1));
  rng::Counter b(rng::chain(42, 2));
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  REQUIRE(same == 0);
}

TEST_CASE("next_index stays in range and covers the range") {
  rng::Counter r(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.next_index(10);
    REQUIRE(v < 10);
    seen.insert(v);
  }
  REQUIRE(seen.size() == 10);
}

TEST_CASE("next_double is in [0,1) with sane mean") {
  rng::Counter r(123);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = r.next_double();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  REQUIRE(std::abs(sum / n - 0.5) < 0.02);
}

TEST_CASE("normal draws have roughly unit variance") {
  rng::Counter r(99);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = r.next_normal();
    REQUIRE(std::isfinite(v));
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  REQUIRE(std::abs(mean) < 0.05);
  REQUIRE(std::abs(sq / n - mean * mean - 1.0) < 0.05);
}

TEST_CASE("shuffle is deterministic and a permutation") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  rng::Counter r1(rng::chain(5, "shuffle"));
  rng::Counter r2(rng::chain(5, "shuffle"));
  rng::shuffle(v, r1);
  rng::shuffle(w, r2);
  REQUIRE(v == w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) REQUIRE(sorted[static_cast<std::size_t>(i)] == i);
}
