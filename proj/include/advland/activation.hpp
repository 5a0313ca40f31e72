#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace advland {

enum class ActivationKind { ReLU, Tanh };

/// Lowercase name used in configs and on the command line ("relu", "tanh").
std::string_view activation_name(ActivationKind kind) noexcept;
std::optional<ActivationKind> parse_activation(std::string_view name) noexcept;

/// A fixed scalar non-linearity with psi(0) = 0 and |psi'| <= 1.
class Activation {
 public:
  constexpr explicit Activation(ActivationKind kind = ActivationKind::ReLU) noexcept
      : kind_(kind) {}

  constexpr ActivationKind kind() const noexcept { return kind_; }
  constexpr bool is_smooth() const noexcept { return kind_ != ActivationKind::ReLU; }
  std::string_view name() const noexcept { return activation_name(kind_); }

  /// Lipschitz constant of psi'. For tanh this is max|tanh''| = 4/(3*sqrt(3)).
  /// Throws NotSmooth for ReLU.
  double lipschitz_of_derivative() const;

  double eval(double t) const noexcept;
  /// psi'(t); ReLU uses psi'(0) = 0.
  double deriv(double t) const noexcept;
  /// psi''(t). Throws NotSmooth for ReLU.
  double second_deriv(double t) const;

  // Element-wise versions over a pre-activation vector.
  Eigen::ArrayXd eval(const Eigen::ArrayXd& z) const;
  Eigen::ArrayXd deriv(const Eigen::ArrayXd& z) const;
  Eigen::ArrayXd second_deriv(const Eigen::ArrayXd& z) const;

  friend constexpr bool operator==(Activation, Activation) = default;

 private:
  ActivationKind kind_;
};

inline constexpr Activation kReLU{ActivationKind::ReLU};
inline constexpr Activation kTanh{ActivationKind::Tanh};

/// E_{X~N(0,1)}[ psi^{(j)}(X)^p ] for j in {0, 1} and 1 <= p <= 8.
/// ReLU uses closed forms; smooth kinds use 128-node Gauss-Hermite quadrature.
double gaussian_moment(const Activation& a, int derivative_order, int power);

/// E_{X~N(0,1)}[g(X)] by Gauss-Hermite quadrature with `nodes` points.
template <typename F>
double gaussian_expectation(F&& g, int nodes = 128);

namespace detail {
struct HermiteRule {
  Eigen::VectorXd nodes;    // already scaled by sqrt(2)
  Eigen::VectorXd weights;  // normalized to sum to 1
};
const HermiteRule& hermite_rule(int nodes);
}  // namespace detail

template <typename F>
double gaussian_expectation(F&& g, int nodes) {
  const auto& rule = detail::hermite_rule(nodes);
  double total = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    total += rule.weights[i] * g(rule.nodes[i]);
  }
  return total;
}

}  // namespace advland
