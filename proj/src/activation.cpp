#include "advland/activation.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "advland/error.hpp"

namespace advland {

std::string_view activation_name(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::Tanh: return "tanh";
  }
  return "unknown";
}

std::optional<ActivationKind> parse_activation(std::string_view name) noexcept {
  if (name == "relu") return ActivationKind::ReLU;
  if (name == "tanh") return ActivationKind::Tanh;
  return std::nullopt;
}

namespace {

// max |tanh''(t)|, attained where tanh(t)^2 = 1/3.
constexpr double kTanhSecondDerivMax = 4.0 / (3.0 * std::numbers::sqrt3);

[[noreturn]] void not_smooth(std::string_view what) {
  fail(ErrorCode::NotSmooth, std::string(what) + ": ReLU has no second derivative");
}

}  // namespace

double Activation::lipschitz_of_derivative() const {
  if (kind_ == ActivationKind::ReLU) not_smooth("lipschitz_of_derivative");
  return kTanhSecondDerivMax;
}

double Activation::eval(double t) const noexcept {
  switch (kind_) {
    case ActivationKind::ReLU: return t > 0.0 ? t : 0.0;
    case ActivationKind::Tanh: return std::tanh(t);
  }
  return 0.0;
}

double Activation::deriv(double t) const noexcept {
  switch (kind_) {
    case ActivationKind::ReLU: return t > 0.0 ? 1.0 : 0.0;
    case ActivationKind::Tanh: {
      const double th = std::tanh(t);
      return 1.0 - th * th;
    }
  }
  return 0.0;
}

double Activation::second_deriv(double t) const {
  if (kind_ == ActivationKind::ReLU) not_smooth("second_deriv");
  const double th = std::tanh(t);
  return -2.0 * th * (1.0 - th * th);
}

Eigen::ArrayXd Activation::eval(const Eigen::ArrayXd& z) const {
  switch (kind_) {
    case ActivationKind::ReLU: return z.max(0.0);
    case ActivationKind::Tanh: return z.tanh();
  }
  return z;
}

Eigen::ArrayXd Activation::deriv(const Eigen::ArrayXd& z) const {
  switch (kind_) {
    case ActivationKind::ReLU: return (z > 0.0).cast<double>();
    case ActivationKind::Tanh: return 1.0 - z.tanh().square();
  }
  return z;
}

Eigen::ArrayXd Activation::second_deriv(const Eigen::ArrayXd& z) const {
  if (kind_ == ActivationKind::ReLU) not_smooth("second_deriv");
  const Eigen::ArrayXd th = z.tanh();
  return -2.0 * th * (1.0 - th.square());
}

namespace detail {

// Golub-Welsch for the probabilists' Hermite weight exp(-x^2/2)/sqrt(2 pi):
// nodes are the eigenvalues of the Jacobi matrix with off-diagonal sqrt(i),
// weights the squared first components of the normalized eigenvectors.
const HermiteRule& hermite_rule(int nodes) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<HermiteRule>> cache;
  if (nodes < 1) fail(ErrorCode::InvalidArgument, "hermite_rule: need at least one node");

  std::lock_guard lock(mutex);
  auto& slot = cache[nodes];
  if (!slot) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(nodes, nodes);
    for (int i = 1; i < nodes; ++i) {
      jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(static_cast<double>(i));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    auto rule = std::make_unique<HermiteRule>();
    rule->nodes = solver.eigenvalues();
    rule->weights = solver.eigenvectors().row(0).transpose().array().square();
    rule->weights /= rule->weights.sum();
    slot = std::move(rule);
  }
  return *slot;
}

}  // namespace detail

double gaussian_moment(const Activation& a, int derivative_order, int power) {
  if (derivative_order != 0 && derivative_order != 1) {
    fail(ErrorCode::InvalidArgument, "gaussian_moment: derivative order must be 0 or 1");
  }
  if (power < 1 || power > 8) {
    fail(ErrorCode::UnsupportedPower,
         "gaussian_moment: power " + std::to_string(power) + " outside [1, 8]");
  }

  if (a.kind() == ActivationKind::ReLU) {
    if (derivative_order == 1) return 0.5;
    // E[max(0,X)^p] = E|X|^p / 2 = 2^{p/2} Gamma((p+1)/2) / (2 sqrt(pi)).
    const double p = power;
    return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) /
           (2.0 * std::sqrt(std::numbers::pi));
  }

  return gaussian_expectation(
      [&](double t) {
        const double v = derivative_order == 0 ? a.eval(t) : a.deriv(t);
        return std::pow(v, power);
      },
      128);
}

}  // namespace advland
