#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "advland/network.hpp"

namespace advland {

enum class Quantity { ValueAbs, GradNorm, HessianOpnorm, GradDeviationSup, FlipFraction };

std::string_view quantity_name(Quantity q) noexcept;
std::optional<Quantity> parse_quantity(std::string_view name) noexcept;

struct LandscapeParams {
  std::size_t d = 0;
  std::size_t k = 0;
  std::optional<double> radius;  // R for deviation / flip quantities
  std::optional<double> eta;
};

/// Monte-Carlo summary of one landscape quantity. `sorted_values` keeps every
/// sample so quantiles are exact order statistics.
struct LandscapeStats {
  Quantity quantity = Quantity::ValueAbs;
  std::size_t samples = 0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  LandscapeParams params;
  std::vector<double> sorted_values;

  double quantile(double p) const;
  /// Mean of the squared samples, i.e. mean^2 + std^2.
  double mean_square() const noexcept { return mean * mean + std * std; }
};

LandscapeStats make_stats(Quantity q, std::vector<double> values, LandscapeParams params);

/// Statistics of |f(x)| over `trials` independent (network, input) pairs.
LandscapeStats estimate_value_stats(std::size_t d, std::size_t k, Activation activation,
                                    std::size_t trials, std::uint64_t seed);

/// Statistics of ||grad f(x)|| over independent (network, input) pairs.
LandscapeStats estimate_gradient_norm(std::size_t d, std::size_t k, Activation activation,
                                      std::size_t trials, std::uint64_t seed);

/// Both of the above from one set of samples; trial i is identical to trial i
/// of the individual estimators.
std::pair<LandscapeStats, LandscapeStats> estimate_value_and_gradient(
    std::size_t d, std::size_t k, Activation activation, std::size_t trials,
    std::uint64_t seed);

/// Operator norm of the Hessian by power iteration on H^2 (H is symmetric, so
/// this finds max |eigenvalue| regardless of sign). Requires a smooth depth-1
/// network and iterations >= 50. Stops early once the estimate is stable to
/// `rel_tol`.
double estimate_hessian_opnorm(const Network& net, const Vector& x, std::size_t iterations,
                               std::uint64_t seed = 0, double rel_tol = 1e-12);

/// Sampled lower estimate of sup_{||delta|| <= R} ||grad f(x) - grad f(x + delta)||:
/// the maximum over `num_dirs` random unit directions times `num_radii` radii
/// R*j/num_radii, plus delta = +-R * grad f(x)/||grad f(x)||.
double estimate_grad_deviation_sup(const Network& net, const Vector& x, double radius,
                                   std::size_t num_dirs, std::size_t num_radii,
                                   std::uint64_t seed = 0);

/// Fraction of hidden units whose sign(w_l . input) differs between x and
/// x + delta (first layer, sign(0) = +1).
double flip_fraction(const Network& net, const Vector& x, const Vector& delta);

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Numerical check of the gradient-descent identity
///   |f(x + eta/||g||^2 g) - (f(x) + eta)| <= |eta| sup_t ||grad f(x + t s) - g|| / ||g||
/// along the segment s = eta/||g||^2 g. lhs is exact; rhs is the maximum over
/// 1000 evenly spaced points, plus a smoothness slack L*||s||/1000*|eta|/||g||
/// for smooth activations. For depth-1 ReLU the gradient is piecewise constant
/// on the segment and every piece is evaluated exactly; deeper ReLU networks
/// use 10^4 points. Throws ZeroGradient.
LemmaCheck check_gradient_descent_lemma(const Network& net, const Vector& x, double eta);

/// Generic trial loop used by the CLI: samples `trials` independent
/// (depth-1 network, input) pairs and evaluates `quantity` on each.
struct LandscapeRequest {
  Quantity quantity = Quantity::ValueAbs;
  Activation activation{};
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double radius = 1.0;
  std::size_t iterations = 100;
  std::size_t num_dirs = 16;
  std::size_t num_radii = 4;
};

LandscapeStats estimate_landscape(const LandscapeRequest& request);

}  // namespace advland
