#include "advland/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "advland/attack.hpp"
#include "advland/error.hpp"
#include "advland/parallel.hpp"
#include "advland/rng.hpp"
#include "advland/stats.hpp"

namespace advland {

std::string_view quantity_name(Quantity q) noexcept {
  switch (q) {
    case Quantity::ValueAbs: return "value_abs";
    case Quantity::GradNorm: return "grad_norm";
    case Quantity::HessianOpnorm: return "hessian_opnorm";
    case Quantity::GradDeviationSup: return "grad_deviation_sup";
    case Quantity::FlipFraction: return "flip_fraction";
  }
  return "unknown";
}

std::optional<Quantity> parse_quantity(std::string_view name) noexcept {
  for (Quantity q : {Quantity::ValueAbs, Quantity::GradNorm, Quantity::HessianOpnorm,
                     Quantity::GradDeviationSup, Quantity::FlipFraction}) {
    if (quantity_name(q) == name) return q;
  }
  return std::nullopt;
}

double LandscapeStats::quantile(double p) const { return order_statistic(sorted_values, p); }

LandscapeStats make_stats(Quantity q, std::vector<double> values, LandscapeParams params) {
  LandscapeStats stats;
  stats.quantity = q;
  stats.samples = values.size();
  const RunningStats summary = summarize(values);
  stats.mean = summary.mean;
  stats.std = summary.stddev();
  stats.params = params;
  std::sort(values.begin(), values.end());
  stats.sorted_values = std::move(values);
  return stats;
}

namespace {

void check_trials(std::size_t trials) {
  if (trials == 0) fail(ErrorCode::InvalidTrials, "trials must be at least 1");
}

Network trial_network(std::size_t d, std::size_t k, Activation activation, std::uint64_t seed,
                      std::size_t trial) {
  return Network::sample(1, d, k, activation,
                         derive_key(seed, {stream_tag::kTrial, trial, stream_tag::kNet}));
}

Vector trial_input(std::size_t d, std::uint64_t seed, std::size_t trial) {
  return sample_input(d, derive_key(seed, {stream_tag::kTrial, trial, stream_tag::kInput})).coords;
}

Vector random_unit(std::size_t d, std::uint64_t key) {
  Stream rng(key);
  Vector u(static_cast<Eigen::Index>(d));
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.normal();
    n = u.norm();
  } while (n == 0.0);
  return u / n;
}

// Largest ||gradient(column) - reference|| over the columns of a d x n block.
double max_column_deviation(const Matrix& gradients, const Vector& reference) {
  return (gradients.colwise() - reference).colwise().norm().maxCoeff();
}

}  // namespace

std::pair<LandscapeStats, LandscapeStats> estimate_value_and_gradient(
    std::size_t d, std::size_t k, Activation activation, std::size_t trials,
    std::uint64_t seed) {
  check_trials(trials);
  std::vector<double> values(trials);
  std::vector<double> norms(trials);
  parallel_for(trials, [&](std::size_t t) {
    const Network net = trial_network(d, k, activation, seed, t);
    const auto vg = net.value_and_gradient(trial_input(d, seed, t));
    values[t] = std::abs(vg.value);
    norms[t] = vg.gradient.norm();
  });
  const LandscapeParams params{d, k, std::nullopt, std::nullopt};
  return {make_stats(Quantity::ValueAbs, std::move(values), params),
          make_stats(Quantity::GradNorm, std::move(norms), params)};
}

LandscapeStats estimate_value_stats(std::size_t d, std::size_t k, Activation activation,
                                    std::size_t trials, std::uint64_t seed) {
  check_trials(trials);
  std::vector<double> values(trials);
  parallel_for(trials, [&](std::size_t t) {
    const Network net = trial_network(d, k, activation, seed, t);
    values[t] = std::abs(net.forward(trial_input(d, seed, t)));
  });
  return make_stats(Quantity::ValueAbs, std::move(values), {d, k, std::nullopt, std::nullopt});
}

LandscapeStats estimate_gradient_norm(std::size_t d, std::size_t k, Activation activation,
                                      std::size_t trials, std::uint64_t seed) {
  check_trials(trials);
  std::vector<double> norms(trials);
  parallel_for(trials, [&](std::size_t t) {
    const Network net = trial_network(d, k, activation, seed, t);
    norms[t] = net.gradient(trial_input(d, seed, t)).norm();
  });
  return make_stats(Quantity::GradNorm, std::move(norms), {d, k, std::nullopt, std::nullopt});
}

double estimate_hessian_opnorm(const Network& net, const Vector& x, std::size_t iterations,
                               std::uint64_t seed, double rel_tol) {
  if (!net.activation().is_smooth()) {
    fail(ErrorCode::NotSmooth, "estimate_hessian_opnorm: ReLU networks have no Hessian");
  }
  if (net.depth() != 1) {
    fail(ErrorCode::Unsupported, "estimate_hessian_opnorm: only depth-1 networks are supported");
  }
  if (iterations < 50) fail(ErrorCode::InvalidArgument, "estimate_hessian_opnorm: iterations < 50");

  // H v = W^T (c .* (W v)) with c = a psi''(W x) / sqrt(k); c is fixed per x.
  const Matrix& w = net.layer(0);
  const Eigen::ArrayXd coeff = net.output_signs().array() *
                               net.activation().second_deriv(net.preactivations(x).array()) /
                               std::sqrt(static_cast<double>(net.hidden_width()));
  const auto apply = [&](const Vector& v) -> Vector {
    return w.transpose() * (coeff * (w * v).array()).matrix();
  };

  Vector v = random_unit(net.input_dim(), derive_key(seed, {stream_tag::kDirection}));
  double estimate = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    const Vector hv = apply(v);
    const double next = hv.norm();  // sqrt(v^T H^2 v) for unit v
    Vector h2v = apply(hv);
    const double n = h2v.norm();
    if (n == 0.0) return next;
    v = h2v / n;
    const bool converged = std::abs(next - estimate) <= rel_tol * next;
    estimate = next;
    if (converged) break;
  }
  return estimate;
}

double estimate_grad_deviation_sup(const Network& net, const Vector& x, double radius,
                                   std::size_t num_dirs, std::size_t num_radii,
                                   std::uint64_t seed) {
  if (!(radius > 0.0)) fail(ErrorCode::DomainError, "estimate_grad_deviation_sup: R must be > 0");
  if (num_radii == 0) fail(ErrorCode::InvalidArgument, "estimate_grad_deviation_sup: num_radii = 0");
  const std::size_t d = net.input_dim();
  const Vector g0 = net.gradient(x);

  std::vector<Vector> offsets;
  offsets.reserve(num_dirs * num_radii + 2);
  const double gnorm = g0.norm();
  if (gnorm > 0.0) {
    offsets.push_back(radius / gnorm * g0);
    offsets.push_back(-radius / gnorm * g0);
  }
  for (std::size_t i = 0; i < num_dirs; ++i) {
    const Vector u = random_unit(d, derive_key(seed, {stream_tag::kDirection, i}));
    for (std::size_t j = 1; j <= num_radii; ++j) {
      offsets.push_back(radius * static_cast<double>(j) / static_cast<double>(num_radii) * u);
    }
  }

  constexpr std::size_t kBlock = 128;
  double best = 0.0;
  for (std::size_t start = 0; start < offsets.size(); start += kBlock) {
    const std::size_t n = std::min(kBlock, offsets.size() - start);
    Matrix points(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) points.col(static_cast<Eigen::Index>(c)) = x + offsets[start + c];
    best = std::max(best, max_column_deviation(batched_gradients(net, points), g0));
  }
  return best;
}

double flip_fraction(const Network& net, const Vector& x, const Vector& delta) {
  const Eigen::ArrayXd before = net.preactivations(x).array();
  const Eigen::ArrayXd after = net.preactivations(x + delta).array();
  std::size_t flips = 0;
  for (Eigen::Index i = 0; i < before.size(); ++i) {
    if (sign_of(before[i]) != sign_of(after[i])) ++flips;
  }
  return static_cast<double>(flips) / static_cast<double>(before.size());
}

LemmaCheck check_gradient_descent_lemma(const Network& net, const Vector& x, double eta) {
  const auto vg = net.value_and_gradient(x);
  const double gnorm = vg.gradient.norm();
  if (gnorm < kZeroGradientNorm) {
    fail(ErrorCode::ZeroGradient, "check_gradient_descent_lemma: gradient norm below 1e-12");
  }
  if (eta == 0.0) return {0.0, 0.0};

  const Vector step = (eta / (gnorm * gnorm)) * vg.gradient;
  LemmaCheck out;
  out.lhs = std::abs(net.forward(x + step) - (vg.value + eta));

  const bool smooth = net.activation().is_smooth();
  std::vector<double> ts;
  if (net.depth() == 1 && !smooth) {
    // Gradient is constant between consecutive activation boundaries; take
    // one interior point per piece plus both ends.
    const Eigen::ArrayXd z0 = net.preactivations(x).array();
    const Eigen::ArrayXd zs = (net.layer(0) * step).array();
    std::vector<double> breaks{0.0, 1.0};
    for (Eigen::Index i = 0; i < z0.size(); ++i) {
      if (zs[i] == 0.0) continue;
      const double t = -z0[i] / zs[i];
      if (t > 0.0 && t < 1.0) breaks.push_back(t);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    ts = {0.0, 1.0};
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) ts.push_back(0.5 * (breaks[i] + breaks[i + 1]));
  } else {
    const std::size_t n = smooth ? 1000 : 10000;
    ts.resize(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }

  constexpr std::size_t kBlock = 250;
  const auto d = static_cast<Eigen::Index>(net.input_dim());
  double worst = 0.0;
  for (std::size_t start = 0; start < ts.size(); start += kBlock) {
    const std::size_t n = std::min(kBlock, ts.size() - start);
    Matrix points(d, static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) points.col(static_cast<Eigen::Index>(c)) = x + ts[start + c] * step;
    worst = std::max(worst, max_column_deviation(batched_gradients(net, points), vg.gradient));
  }

  const double scale = std::abs(eta) / gnorm;
  out.rhs = scale * worst;
  if (smooth) {
    out.rhs += net.activation().lipschitz_of_derivative() * step.norm() / 1000.0 * scale;
  }
  return out;
}

LandscapeStats estimate_landscape(const LandscapeRequest& request) {
  check_trials(request.trials);
  const std::size_t d = request.d;
  const std::size_t k = request.k;
  if (d == 0 || k == 0) fail(ErrorCode::InvalidDims, "estimate_landscape: d and k must be positive");
  if (request.quantity == Quantity::HessianOpnorm && !request.activation.is_smooth()) {
    fail(ErrorCode::NotSmooth, "hessian_opnorm requires a smooth activation");
  }

  std::vector<double> values(request.trials);
  parallel_for(request.trials, [&](std::size_t t) {
    const Network net = trial_network(d, k, request.activation, request.seed, t);
    const Vector x = trial_input(d, request.seed, t);
    const std::uint64_t key = derive_key(request.seed, {stream_tag::kTrial, t, stream_tag::kDirection});
    switch (request.quantity) {
      case Quantity::ValueAbs: values[t] = std::abs(net.forward(x)); break;
      case Quantity::GradNorm: values[t] = net.gradient(x).norm(); break;
      case Quantity::HessianOpnorm:
        values[t] = estimate_hessian_opnorm(net, x, request.iterations, key);
        break;
      case Quantity::GradDeviationSup:
        values[t] = estimate_grad_deviation_sup(net, x, request.radius, request.num_dirs,
                                                request.num_radii, key);
        break;
      case Quantity::FlipFraction:
        values[t] = flip_fraction(net, x, request.radius * random_unit(d, key));
        break;
    }
  });

  LandscapeParams params{d, k, std::nullopt, std::nullopt};
  if (request.quantity == Quantity::GradDeviationSup || request.quantity == Quantity::FlipFraction) {
    params.radius = request.radius;
  }
  return make_stats(request.quantity, std::move(values), params);
}

}  // namespace advland
