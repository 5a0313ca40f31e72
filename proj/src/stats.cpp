#include "advland/stats.hpp"

#include <algorithm>
#include <cmath>

#include "advland/error.hpp"

namespace advland {

void RunningStats::push(double value) noexcept {
  ++count;
  const double delta = value - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (value - mean);
}

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double n_a = static_cast<double>(count);
  const double n_b = static_cast<double>(other.count);
  const double n = n_a + n_b;
  const double delta = other.mean - mean;
  mean += delta * n_b / n;
  m2 += other.m2 + delta * delta * n_a * n_b / n;
  count += other.count;
}

double RunningStats::variance() const noexcept {
  return count == 0 ? 0.0 : std::max(0.0, m2 / static_cast<double>(count));
}

double RunningStats::stddev() const noexcept { return std::sqrt(variance()); }

RunningStats summarize(std::span<const double> values) noexcept {
  // Pairwise merge keeps the rounding error at O(log n).
  if (values.size() <= 64) {
    RunningStats s;
    for (double v : values) s.push(v);
    return s;
  }
  const std::size_t half = values.size() / 2;
  RunningStats left = summarize(values.first(half));
  left.merge(summarize(values.subspan(half)));
  return left;
}

double order_statistic(std::span<const double> sorted, double p) {
  if (sorted.empty()) fail(ErrorCode::InvalidArgument, "order_statistic: no samples");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::DomainError, "order_statistic: p outside [0, 1]");
  const double n = static_cast<double>(sorted.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(p * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double binomial_slack(double gamma, std::size_t trials) {
  if (trials == 0) return 1.0;
  return 2.0 * std::sqrt(gamma * (1.0 - gamma) / static_cast<double>(trials));
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "median: no samples");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace advland
