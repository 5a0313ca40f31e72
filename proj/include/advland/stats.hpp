#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace advland {

/// Streaming mean/variance (Welford) with a Chan-style merge.
struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double value) noexcept;
  void merge(const RunningStats& other) noexcept;
  /// Population variance (divides by count).
  double variance() const noexcept;
  double stddev() const noexcept;
};

RunningStats summarize(std::span<const double> values) noexcept;

/// Exact order statistic: the ceil(p*n)-th smallest value (p = 0 gives the
/// minimum). `sorted` must be ascending and non-empty.
double order_statistic(std::span<const double> sorted, double p);

/// Two-sigma binomial slack used for exceedance checks.
double binomial_slack(double gamma, std::size_t trials);

double median(std::vector<double> values);

}  // namespace advland
