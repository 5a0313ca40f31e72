#include "advland/network.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <string>

#include "advland/error.hpp"
#include "advland/rng.hpp"

namespace advland {

InputPoint sample_input(std::size_t d, std::uint64_t seed) {
  if (d == 0) fail(ErrorCode::InvalidDims, "sample_input: d must be positive");
  Stream rng(seed, {stream_tag::kInput});
  Vector x(static_cast<Eigen::Index>(d));
  double norm_sq = 0.0;
  do {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
    norm_sq = x.squaredNorm();
  } while (norm_sq == 0.0);
  x /= std::sqrt(norm_sq);
  x *= std::sqrt(static_cast<double>(d));
  return InputPoint{std::move(x)};
}

Network::Network(std::vector<Matrix> layers, Vector signs, Activation activation,
                 std::uint64_t seed)
    : layers_(std::move(layers)),
      signs_(std::move(signs)),
      activation_(activation),
      seed_(seed),
      inv_sqrt_k_(1.0 / std::sqrt(static_cast<double>(signs_.size()))) {}

Network Network::sample(std::size_t depth, std::size_t input_dim, std::size_t hidden_width,
                        Activation activation, std::uint64_t seed) {
  if (depth == 0 || input_dim == 0 || hidden_width == 0) {
    fail(ErrorCode::InvalidDims, "sample_network: depth, d and k must all be positive (got depth=" +
                                     std::to_string(depth) + ", d=" + std::to_string(input_dim) +
                                     ", k=" + std::to_string(hidden_width) + ")");
  }
  const auto k = static_cast<Eigen::Index>(hidden_width);
  std::vector<Matrix> layers;
  layers.reserve(depth);
  for (std::size_t j = 0; j < depth; ++j) {
    const auto fan_in = static_cast<Eigen::Index>(j == 0 ? input_dim : hidden_width);
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Stream rng(seed, {stream_tag::kLayer, j});
    Matrix w(k, fan_in);
    double* data = w.data();
    for (Eigen::Index i = 0; i < w.size(); ++i) data[i] = scale * rng.normal();
    layers.push_back(std::move(w));
  }
  Stream sign_rng(seed, {stream_tag::kSigns});
  Vector signs(k);
  for (Eigen::Index i = 0; i < k; ++i) signs[i] = sign_rng.sign();
  return Network(std::move(layers), std::move(signs), activation, seed);
}

Network Network::from_parts(std::vector<Matrix> hidden_weights, Vector output_signs,
                            Activation activation, std::uint64_t seed) {
  if (hidden_weights.empty()) fail(ErrorCode::InvalidDims, "from_parts: no layers");
  const Eigen::Index k = output_signs.size();
  if (k == 0 || hidden_weights.front().cols() == 0) {
    fail(ErrorCode::InvalidDims, "from_parts: zero dimension");
  }
  for (std::size_t j = 0; j < hidden_weights.size(); ++j) {
    const Matrix& w = hidden_weights[j];
    if (w.rows() != k || (j > 0 && w.cols() != k)) {
      fail(ErrorCode::InvalidDims, "from_parts: layer " + std::to_string(j) + " has shape " +
                                       std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
    }
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    if (output_signs[i] != 1.0 && output_signs[i] != -1.0) {
      fail(ErrorCode::InvalidArgument, "from_parts: output signs must be +1 or -1");
    }
  }
  return Network(std::move(hidden_weights), std::move(output_signs), activation, seed);
}

Network Network::with_activation(Activation activation) && {
  activation_ = activation;
  return std::move(*this);
}

Network Network::with_negated_signs() const {
  Network copy = *this;
  copy.signs_ = -signs_;
  return copy;
}

void Network::check_input(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim()) {
    fail(ErrorCode::DimMismatch, "input has dimension " + std::to_string(x.size()) +
                                     ", network expects " + std::to_string(input_dim()));
  }
}

Vector Network::preactivations(const Vector& x) const {
  check_input(x);
  return layers_.front() * x;
}

double Network::forward_from_first(const Eigen::ArrayXd& z1) const {
  Eigen::ArrayXd h = activation_.eval(z1);
  for (std::size_t j = 1; j < layers_.size(); ++j) {
    h = activation_.eval((layers_[j] * h.matrix()).array());
  }
  return inv_sqrt_k_ * signs_.dot(h.matrix());
}

double Network::forward(const Vector& x) const {
  check_input(x);
  return forward_from_first((layers_.front() * x).array());
}

Network::ValueGradient Network::value_and_gradient(const Vector& x) const {
  check_input(x);
  if (layers_.size() == 1) {
    const Eigen::ArrayXd z = (layers_.front() * x).array();
    const double value = inv_sqrt_k_ * signs_.dot(activation_.eval(z).matrix());
    const Vector coeff = inv_sqrt_k_ * (signs_.array() * activation_.deriv(z)).matrix();
    return {value, layers_.front().transpose() * coeff};
  }

  // Reverse-mode through the stack; keep every pre-activation.
  std::vector<Eigen::ArrayXd> pre;
  pre.reserve(layers_.size());
  Eigen::ArrayXd h;
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    if (j == 0) {
      pre.push_back((layers_[0] * x).array());
    } else {
      pre.push_back((layers_[j] * h.matrix()).array());
    }
    h = activation_.eval(pre.back());
  }
  const double value = inv_sqrt_k_ * signs_.dot(h.matrix());

  Vector back = inv_sqrt_k_ * signs_;
  for (std::size_t j = layers_.size(); j-- > 0;) {
    const Vector dz = (back.array() * activation_.deriv(pre[j])).matrix();
    back = layers_[j].transpose() * dz;
  }
  return {value, std::move(back)};
}

Vector Network::gradient(const Vector& x) const { return value_and_gradient(x).gradient; }

Vector Network::hessian_vector_product(const Vector& x, const Vector& u) const {
  if (!activation_.is_smooth()) {
    fail(ErrorCode::NotSmooth, "hessian_vector_product: ReLU networks have no Hessian");
  }
  if (layers_.size() != 1) {
    fail(ErrorCode::Unsupported, "hessian_vector_product: only depth-1 networks are supported");
  }
  check_input(x);
  check_input(u);
  const Matrix& w = layers_.front();
  const Eigen::ArrayXd z = (w * x).array();
  const Eigen::ArrayXd wu = (w * u).array();
  const Vector coeff = inv_sqrt_k_ * (signs_.array() * activation_.second_deriv(z) * wu).matrix();
  return w.transpose() * coeff;
}

// ---------------------------------------------------------------------------
// Binary dump
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<char, 8> kMagic{'A', 'D', 'V', 'L', 'N', 'E', 'T', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> bytes;
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), 4);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) fail(ErrorCode::IoError, "network dump truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 4);
  if (!in) fail(ErrorCode::IoError, "network dump truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void Network::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(depth()));
  put_u64(out, input_dim());
  put_u64(out, hidden_width());
  put_u32(out, static_cast<std::uint32_t>(activation_.kind()));
  put_u32(out, 0);
  put_u64(out, seed_);
  for (const Matrix& w : layers_) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(out, w(r, c));
    }
  }
  for (Eigen::Index i = 0; i < signs_.size(); ++i) put_f64(out, signs_[i]);
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

Network Network::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) fail(ErrorCode::ParseError, path.string() + " is not a network dump");
  const std::uint32_t version = get_u32(in);
  if (version != kFormatVersion) {
    fail(ErrorCode::ParseError, "unsupported network dump version " + std::to_string(version));
  }
  const std::uint32_t depth = get_u32(in);
  const std::uint64_t d = get_u64(in);
  const std::uint64_t k = get_u64(in);
  const std::uint32_t kind = get_u32(in);
  get_u32(in);
  const std::uint64_t seed = get_u64(in);
  if (kind > static_cast<std::uint32_t>(ActivationKind::Tanh)) {
    fail(ErrorCode::ParseError, "unknown activation id " + std::to_string(kind));
  }
  if (depth == 0 || d == 0 || k == 0) fail(ErrorCode::ParseError, "network dump has zero dims");

  std::vector<Matrix> layers;
  for (std::uint32_t j = 0; j < depth; ++j) {
    Matrix w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j == 0 ? d : k));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get_f64(in);
    }
    layers.push_back(std::move(w));
  }
  Vector signs(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < signs.size(); ++i) signs[i] = get_f64(in);
  return from_parts(std::move(layers), std::move(signs),
                    Activation(static_cast<ActivationKind>(kind)), seed);
}

// ---------------------------------------------------------------------------

RayEvaluator::RayEvaluator(const Network& net, const Vector& x, const Vector& direction)
    : net_(&net) {
  net.check_input(x);
  net.check_input(direction);
  base_ = (net.layers_.front() * x).array();
  slope_ = (net.layers_.front() * direction).array();
}

double RayEvaluator::value(double t) const { return net_->forward_from_first(base_ + t * slope_); }

Matrix batched_gradients(const Network& net, const Matrix& points) {
  if (static_cast<std::size_t>(points.rows()) != net.input_dim()) {
    fail(ErrorCode::DimMismatch, "batched_gradients: point dimension mismatch");
  }
  if (net.depth() != 1) {
    Matrix out(points.rows(), points.cols());
    for (Eigen::Index c = 0; c < points.cols(); ++c) out.col(c) = net.gradient(points.col(c));
    return out;
  }
  const Matrix& w = net.layer(0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(net.hidden_width()));
  Matrix coeff = w * points;
  const Eigen::ArrayXd signs = net.output_signs().array() * scale;
  for (Eigen::Index c = 0; c < coeff.cols(); ++c) {
    coeff.col(c) = (signs * net.activation().deriv(coeff.col(c).array())).matrix();
  }
  return w.transpose() * coeff;
}

}  // namespace advland
