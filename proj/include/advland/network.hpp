#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "advland/activation.hpp"

namespace advland {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point of the input sphere of radius sqrt(d).
struct InputPoint {
  Vector coords;
};

/// Uniform point on the sphere of radius sqrt(d): a standard Gaussian vector
/// rescaled to that norm.
InputPoint sample_input(std::size_t d, std::uint64_t seed);

/// Random network
///
///   f(x) = (1/sqrt(k)) * sum_l a_l * h_L(x)_l,   h_j = psi(W_j h_{j-1}),  h_0 = x
///
/// with W_j entries i.i.d. N(0, 1/fan_in) and a_l uniform in {-1, +1}.
/// Depth 1 is the two-layer model. Immutable once built.
class Network {
 public:
  /// Throws InvalidDims if any dimension is zero.
  static Network sample(std::size_t depth, std::size_t input_dim, std::size_t hidden_width,
                        Activation activation, std::uint64_t seed);

  /// Assembles a network from explicit weights (crafted test cases, replay).
  /// Layer 0 must be k x d and later layers k x k; signs must have length k.
  static Network from_parts(std::vector<Matrix> hidden_weights, Vector output_signs,
                            Activation activation, std::uint64_t seed = 0);

  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(layers_.front().cols()); }
  std::size_t hidden_width() const noexcept { return static_cast<std::size_t>(signs_.size()); }
  const Matrix& layer(std::size_t j) const { return layers_.at(j); }
  const std::vector<Matrix>& hidden_weights() const noexcept { return layers_; }
  const Vector& output_signs() const noexcept { return signs_; }
  const Activation& activation() const noexcept { return activation_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Same weights, different non-linearity. Consumes *this.
  Network with_activation(Activation activation) &&;
  /// Same weights and activation with every output sign negated.
  Network with_negated_signs() const;

  double forward(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  struct ValueGradient {
    double value;
    Vector gradient;
  };
  ValueGradient value_and_gradient(const Vector& x) const;

  /// Hessian applied to u without forming the d x d matrix. Depth 1, smooth
  /// activations only (NotSmooth / Unsupported otherwise).
  Vector hessian_vector_product(const Vector& x, const Vector& u) const;

  /// First-layer pre-activations W_1 x.
  Vector preactivations(const Vector& x) const;

  /// Binary dump: little-endian, header (magic, version, depth, d, k,
  /// activation id, seed) followed by the weights row-major and the signs.
  void save(const std::filesystem::path& path) const;
  static Network load(const std::filesystem::path& path);

 private:
  Network(std::vector<Matrix> layers, Vector signs, Activation activation, std::uint64_t seed);

  void check_input(const Vector& x) const;
  /// Evaluates layers 2..L given the first-layer pre-activations.
  double forward_from_first(const Eigen::ArrayXd& z1) const;

  std::vector<Matrix> layers_;
  Vector signs_;
  Activation activation_;
  std::uint64_t seed_ = 0;
  double inv_sqrt_k_ = 1.0;

  friend class RayEvaluator;
};

/// Evaluates f(x + t * direction) for many t. The first layer is affine in t,
/// so after two matrix-vector products each depth-1 evaluation costs O(k).
class RayEvaluator {
 public:
  RayEvaluator(const Network& net, const Vector& x, const Vector& direction);

  double value(double t) const;

 private:
  const Network* net_;
  Eigen::ArrayXd base_;
  Eigen::ArrayXd slope_;
};

/// Gradients of a depth-1 network at many points, batched as matrix products.
/// Column i of `points` is one input; returns the d x n matrix of gradients.
Matrix batched_gradients(const Network& net, const Matrix& points);

}  // namespace advland
