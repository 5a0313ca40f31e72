#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advland/activation.hpp"

namespace advland {

// ---------------------------------------------------------------------------
// Closed-form high-probability bounds. All throw DomainError on gamma outside
// the stated range or non-positive sizes.
// ---------------------------------------------------------------------------

/// sqrt(2 sigma^2 k log(1/gamma)) + c log(1/gamma): with probability 1-gamma a
/// sum of k centered variables with Bernstein moment growth stays below this.
double bernstein_bound(double sigma, double c, double k, double gamma);

/// 4 sqrt(k log(2/gamma)): deviation of a chi-square with k degrees of freedom.
double chisq_deviation_bound(double k, double gamma);

/// Upper bound on |f(x)|.
///   smooth: sqrt(2 log(1/gamma)) (1 + sqrt(log(2/gamma)/k))
///   relu:   sqrt(2 log(2/gamma)) (1 + sqrt(log(2/gamma)/k))
double value_bound(ActivationKind kind, double k, double gamma);

/// Lower bound on ||grad f(x)||, clamped at 0 in the vacuous regime.
///   smooth: (c^2 - sqrt(2 log(4/g)/k)(1 + sqrt(log(4/g)/k)))^{1/2} (1 - 5 sqrt(log(8/g)/d))
///   relu:   (1/2 - sqrt(2 log(4/g)/k)(1 + sqrt(log(1/g)/k)))^{1/2} (1 - 5 sqrt(log(4/g)/d))
/// c^2 = E[psi'(X)^2] defaults to the activation's Gaussian moment; ReLU always
/// uses 1/2. Requires 0 < gamma < 2/e.
double grad_lower_bound(ActivationKind kind, double k, double d, double gamma,
                        std::optional<double> c_psi_sq = std::nullopt);

/// 20 R L (sqrt(log(k/gamma)/d) + log(1/gamma)/sqrt(k)); requires R >= 1.
double grad_dev_bound_smooth(double radius, double lipschitz, double k, double d, double gamma);

/// 20 (R log^2(Rk) sqrt(log d / d))^{1/4} + 40 sqrt(d/k) log(Rk).
/// Hypotheses 1 <= R <= sqrt(d)/2, sqrt(k) >= 52 and d >= log(1/gamma) are
/// checked; a failure throws PreconditionViolated naming the hypothesis.
double grad_dev_bound_relu(double radius, double k, double d, double gamma);

struct FlipProbBounds {
  double single;  // R sqrt(2 log(d)/d) + 1/d
  double ball;    // 2 eps (1 + 2 sqrt(log(2/eps)/d))
};

/// Requires 0 <= R <= sqrt(d)/2 and 0 < eps <= 1.
FlipProbBounds flip_prob_bounds(double radius, double d, double epsilon);

/// Bound on Phi(v, delta) = (1/sqrt(k)) sum a_l (w_l.v)(psi'(w_l.x) - psi'(w_l.(x+delta)))
/// for one fixed (v, delta) with ||delta|| <= R.
///   smooth: (4 R L / d) sqrt(log(1/g)) (1 + sqrt(log(1/g)/k))
///   relu:   2 sqrt(log(1/g)/d) ((2 R sqrt(log(d)/d))^{1/4} + sqrt(log(1/g)/k)), R >= 1
double per_sample_grad_dev_bound(ActivationKind kind, double radius, double d, double k,
                                 double gamma, double lipschitz = 0.0);

/// c3 sqrt(log(1/gamma)); the theorems leave c3 symbolic.
double theorem_eta(ActivationKind kind, double gamma, double c3);

// ---------------------------------------------------------------------------
// Empirical verification
// ---------------------------------------------------------------------------

/// Identifies one bound together with the statistic it controls. Recognised
/// names: "bernstein", "chisq", "value_bound", "grad_lower_bound",
/// "per_sample_grad_dev", "flip_prob_single", "grad_dev_smooth", "grad_dev_relu".
/// Parameters: k, d, R, gamma (and num_dirs / num_radii for the sup bounds).
struct BoundSpec {
  std::string name;
  Activation activation{};
  std::map<std::string, double> params;

  double param(const std::string& key) const;
  double param_or(const std::string& key, double fallback) const;
  /// "name/activation" for network bounds, plain name otherwise.
  std::string label() const;
};

struct BoundReport {
  std::string name;
  std::string activation;  // empty for network-free bounds
  std::map<std::string, double> params;
  double bound_value = 0.0;
  double empirical_exceed_rate = 0.0;
  std::size_t trials = 0;
  bool pass = false;
};

/// Every recognised bound name.
const std::vector<std::string>& known_bounds();
bool is_known_bound(const std::string& name);

/// Closed-form value of the bound described by `spec`.
double evaluate_bound(const BoundSpec& spec);

/// Draws `trials` samples of the statistic controlled by `spec`. The input x,
/// probe direction v and perturbation delta are fixed per (seed, d); only the
/// network is resampled each trial. Independent of gamma.
std::vector<double> sample_bound_statistic(const BoundSpec& spec, std::size_t trials,
                                           std::uint64_t seed);

/// Batched form of sample_bound_statistic. Network-based specs sharing
/// (d, k, R) reuse one network draw per trial, so each result is identical to
/// sampling that spec alone.
std::vector<std::vector<double>> sample_bound_statistics(std::span<const BoundSpec> specs,
                                                         std::size_t trials, std::uint64_t seed);

/// Whether one sample violates the bound (lower bounds are violated from below).
bool exceeds(const BoundSpec& spec, double statistic, double bound_value);

BoundReport report_from_samples(const BoundSpec& spec, const std::vector<double>& samples);

/// Samples the statistic, compares it with the closed form and fills a report.
/// pass <=> exceed_rate <= gamma + 2 sqrt(gamma (1 - gamma) / trials).
/// Throws UnknownBound or InvalidTrials (trials == 0).
BoundReport verify_bound(const BoundSpec& spec, std::size_t trials, std::uint64_t seed);

}  // namespace advland
