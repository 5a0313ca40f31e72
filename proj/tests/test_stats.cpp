#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "advland/rng.hpp"
#include "advland/stats.hpp"

using namespace advland;

TEST_CASE("running stats match the two-pass population formulas") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Stream rng(seed, {1});
    const std::size_t n = 1 + rng() % 300;
    std::vector<double> v(n);
    for (auto& x : v) x = 3.0 + 2.0 * rng.normal();

    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);

    const RunningStats s = summarize(v);
    CHECK(s.count == n);
    CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.variance() == doctest::Approx(var).epsilon(1e-10));

    // merge of two halves equals the whole
    RunningStats left, right;
    for (std::size_t i = 0; i < n; ++i) (i < n / 2 ? left : right).push(v[i]);
    left.merge(right);
    CHECK(left.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(left.variance() == doctest::Approx(var).epsilon(1e-10));
  }
}

TEST_CASE("single sample has zero spread") {
  RunningStats s;
  s.push(4.5);
  CHECK(s.mean == 4.5);
  CHECK(s.stddev() == 0.0);
}

TEST_CASE("order statistics are exact ranks") {
  const std::vector<double> sorted{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(order_statistic(sorted, 0.0) == 1);
  CHECK(order_statistic(sorted, 0.05) == 1);
  CHECK(order_statistic(sorted, 0.1) == 1);
  CHECK(order_statistic(sorted, 0.11) == 2);
  CHECK(order_statistic(sorted, 0.5) == 5);
  CHECK(order_statistic(sorted, 1.0) == 10);
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
}

TEST_CASE("binomial slack") {
  CHECK(binomial_slack(0.05, 10000) == doctest::Approx(2 * std::sqrt(0.05 * 0.95 / 10000)));
}
