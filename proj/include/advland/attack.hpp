#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "advland/network.hpp"

namespace advland {

/// sign(0) is taken as +1 throughout.
constexpr double sign_of(double v) noexcept { return v < 0.0 ? -1.0 : 1.0; }

/// Result of stepping from x to x + eta * grad f(x).
struct AttackOutcome {
  double eta = 0.0;
  double perturbation_norm = 0.0;  // |eta| * ||grad f(x)||
  double value_before = 0.0;
  double value_after = 0.0;
  bool flipped = false;
};

inline constexpr double kZeroGradientNorm = 1e-12;
inline constexpr double kDefaultEtaMax = 20.0;
inline constexpr std::size_t kDefaultEtaGrid = 400;
inline constexpr int kBisectionSteps = 40;

/// One gradient step with eta = -sign(f(x)) * eta_magnitude.
/// Throws ZeroGradient when ||grad f(x)|| < 1e-12.
AttackOutcome single_step_attack(const Network& net, const Vector& x, double eta_magnitude);

/// Smallest |eta| in (0, eta_max] for which x + eta * grad f(x) changes sign,
/// with sign(eta) = -sign(f(x)). Scans `grid` evenly spaced magnitudes and then
/// bisects 40 times between the last non-flipping and the first flipping grid
/// point. f along the ray need not be monotone, so this is the smallest
/// grid-bracketed flip. The returned value is signed and always flips.
std::optional<double> smallest_flip_eta(const Network& net, const Vector& x,
                                        double eta_max = kDefaultEtaMax,
                                        std::size_t grid = kDefaultEtaGrid);

/// Same search along an arbitrary direction: smallest t in (0, t_max] with
/// sign(f(x + s*t*direction)) != sign(f(x)), where s = -sign(f(x)).
/// Returns the unsigned t.
std::optional<double> smallest_flip_along(const Network& net, const Vector& x,
                                          const Vector& direction, double t_max,
                                          std::size_t grid);

/// Input-independent direction (1/sqrt(k)) * sum_l a_l w_l. Depth 1 only.
Vector universal_direction(const Network& net);

/// Searches the step along -sign(f(x)) * universal_direction(net) that flips
/// the sign, with the same grid and bisection as smallest_flip_eta.
std::optional<double> universal_flip_eta(const Network& net, const Vector& x,
                                         double eta_max = kDefaultEtaMax,
                                         std::size_t grid = kDefaultEtaGrid);

struct Trajectory {
  std::vector<AttackOutcome> steps;
  Vector final_point;
  bool flipped = false;
  bool zero_gradient = false;  // stopped early on a vanishing gradient
};

/// Normalized gradient steps x_{t+1} = x_t - sign(f(x_0)) * step_size *
/// grad f(x_t) / ||grad f(x_t)|| until the sign flips or max_steps is reached.
/// Step t records eta = -sign(f(x_0)) * step_size / ||grad f(x_t)||.
Trajectory multi_step_attack(const Network& net, const Vector& x, double step_size,
                             std::size_t max_steps);

}  // namespace advland
