#include <doctest.h>

#include <cmath>
#include <set>

#include "advland/parallel.hpp"
#include "advland/rng.hpp"
#include "advland/stats.hpp"

using namespace advland;

TEST_CASE("derived keys depend on every path element") {
  std::set<std::uint64_t> keys;
  for (std::uint64_t a = 0; a < 30; ++a) {
    for (std::uint64_t b = 0; b < 30; ++b) keys.insert(derive_key(9, {a, b}));
  }
  CHECK(keys.size() == 900);
  CHECK(derive_key(1, {2, 3}) != derive_key(1, {3, 2}));
  CHECK(derive_key(1, {0}) != derive_key(2, {0}));
  CHECK(derive_key(5, {1, 2}) == derive_key(5, {1, 2}));
}

TEST_CASE("streams are reproducible and independent of draw order elsewhere") {
  Stream a(42, {1, 2});
  Stream b(42, {1, 2});
  Stream other(42, {1, 3});
  for (int i = 0; i < 100; ++i) other();
  for (int i = 0; i < 1000; ++i) CHECK(a() == b());
}

TEST_CASE("normal draws have unit variance and uniform draws lie in [0,1)") {
  Stream rng(7, {});
  RunningStats n, u;
  for (int i = 0; i < 200000; ++i) {
    n.push(rng.normal());
    const double x = rng.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    u.push(x);
  }
  CHECK(std::abs(n.mean) < 0.01);
  CHECK(std::abs(n.variance() - 1.0) < 0.01);
  CHECK(std::abs(u.mean - 0.5) < 0.005);

  int plus = 0;
  for (int i = 0; i < 100000; ++i) plus += rng.sign() > 0;
  CHECK(std::abs(plus - 50000) < 1000);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  CHECK(worker_count() >= 1);
}
