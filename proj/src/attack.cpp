#include "advland/attack.hpp"

#include <cmath>
#include <string>

#include "advland/error.hpp"

namespace advland {

namespace {

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must be positive and finite");
  }
}

Network::ValueGradient nonzero_gradient(const Network& net, const Vector& x) {
  auto vg = net.value_and_gradient(x);
  if (vg.gradient.norm() < kZeroGradientNorm) {
    fail(ErrorCode::ZeroGradient, "gradient norm below 1e-12; perturbation undefined");
  }
  return vg;
}

// Grid scan plus bisection along x + t * step_dir, t in (0, t_max]. The ray
// evaluator decides the bracket; the final point is confirmed with a plain
// forward pass, nudging outwards when rounding puts it exactly on the boundary.
std::optional<double> search_flip(const Network& net, const Vector& x, double f0,
                                  const Vector& step_dir, double t_max, std::size_t grid) {
  check_positive(t_max, "eta_max");
  if (grid < 2) fail(ErrorCode::InvalidArgument, "grid must have at least 2 points");

  const double s0 = sign_of(f0);
  const RayEvaluator ray(net, x, step_dir);
  const auto flips = [&](double t) { return sign_of(ray.value(t)) != s0; };

  double lo = 0.0;
  for (std::size_t i = 1; i <= grid; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(grid);
    if (!flips(t)) {
      lo = t;
      continue;
    }
    double hi = t;
    for (int step = 0; step < kBisectionSteps; ++step) {
      const double mid = 0.5 * (lo + hi);
      (flips(mid) ? hi : lo) = mid;
    }
    const auto confirmed = [&](double v) { return sign_of(net.forward(x + v * step_dir)) != s0; };
    double width = (hi - lo) > 0.0 ? (hi - lo) : t_max * 1e-15;
    while (!confirmed(hi) && hi < t) {
      hi = std::min(t, hi + width);
      width *= 2.0;
    }
    return hi;
  }
  return std::nullopt;
}

}  // namespace

AttackOutcome single_step_attack(const Network& net, const Vector& x, double eta_magnitude) {
  check_positive(eta_magnitude, "eta_magnitude");
  const auto vg = nonzero_gradient(net, x);
  AttackOutcome out;
  out.eta = -sign_of(vg.value) * eta_magnitude;
  out.perturbation_norm = eta_magnitude * vg.gradient.norm();
  out.value_before = vg.value;
  out.value_after = net.forward(x + out.eta * vg.gradient);
  out.flipped = sign_of(out.value_before) != sign_of(out.value_after);
  return out;
}

std::optional<double> smallest_flip_eta(const Network& net, const Vector& x, double eta_max,
                                        std::size_t grid) {
  const auto vg = nonzero_gradient(net, x);
  const double s = -sign_of(vg.value);
  const auto t = search_flip(net, x, vg.value, s * vg.gradient, eta_max, grid);
  if (!t) return std::nullopt;
  return s * *t;
}

std::optional<double> smallest_flip_along(const Network& net, const Vector& x,
                                          const Vector& direction, double t_max,
                                          std::size_t grid) {
  const double f0 = net.forward(x);
  return search_flip(net, x, f0, -sign_of(f0) * direction, t_max, grid);
}

Vector universal_direction(const Network& net) {
  if (net.depth() != 1) {
    fail(ErrorCode::Unsupported, "universal_direction: only depth-1 networks are supported");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(net.hidden_width()));
  return scale * (net.layer(0).transpose() * net.output_signs());
}

std::optional<double> universal_flip_eta(const Network& net, const Vector& x, double eta_max,
                                         std::size_t grid) {
  const Vector u = universal_direction(net);
  const double f0 = net.forward(x);
  const double s = -sign_of(f0);
  const auto t = search_flip(net, x, f0, s * u, eta_max, grid);
  if (!t) return std::nullopt;
  return s * *t;
}

Trajectory multi_step_attack(const Network& net, const Vector& x, double step_size,
                             std::size_t max_steps) {
  check_positive(step_size, "step_size");
  if (max_steps == 0) fail(ErrorCode::InvalidArgument, "max_steps must be positive");

  Trajectory traj;
  Vector point = x;
  double s0 = 0.0;
  for (std::size_t t = 0; t < max_steps; ++t) {
    const auto vg = net.value_and_gradient(point);
    if (t == 0) s0 = sign_of(vg.value);
    const double gnorm = vg.gradient.norm();
    if (gnorm < kZeroGradientNorm) {
      traj.zero_gradient = true;
      break;
    }
    AttackOutcome step;
    step.eta = -s0 * step_size / gnorm;
    step.perturbation_norm = std::abs(step.eta) * gnorm;
    step.value_before = vg.value;
    Vector next = point + step.eta * vg.gradient;
    step.value_after = net.forward(next);
    step.flipped = sign_of(step.value_after) != s0;
    traj.steps.push_back(step);
    point = std::move(next);
    if (step.flipped) {
      traj.flipped = true;
      break;
    }
  }
  traj.final_point = std::move(point);
  return traj;
}

}  // namespace advland
