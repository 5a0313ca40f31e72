#include "advland/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <tuple>

#include "advland/attack.hpp"
#include "advland/error.hpp"
#include "advland/landscape.hpp"
#include "advland/network.hpp"
#include "advland/parallel.hpp"
#include "advland/rng.hpp"
#include "advland/stats.hpp"

namespace advland {

namespace {

void check_gamma(double gamma, double upper = 1.0) {
  if (!(gamma > 0.0 && gamma < upper)) {
    fail(ErrorCode::DomainError, "gamma = " + std::to_string(gamma) + " outside (0, " +
                                     std::to_string(upper) + ")");
  }
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorCode::DomainError, std::string(what) + " must be positive");
  }
}

void check_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    fail(ErrorCode::DomainError, std::string(what) + " must be non-negative");
  }
}

}  // namespace

double bernstein_bound(double sigma, double c, double k, double gamma) {
  check_positive(sigma, "sigma");
  check_positive(c, "c");
  if (!(k >= 1.0)) fail(ErrorCode::DomainError, "bernstein_bound: k must be >= 1");
  check_gamma(gamma);
  const double lg = std::log(1.0 / gamma);
  return std::sqrt(2.0 * sigma * sigma * k * lg) + c * lg;
}

double chisq_deviation_bound(double k, double gamma) {
  if (!(k >= 1.0)) fail(ErrorCode::DomainError, "chisq_deviation_bound: k must be >= 1");
  check_gamma(gamma);
  return 4.0 * std::sqrt(k * std::log(2.0 / gamma));
}

double value_bound(ActivationKind kind, double k, double gamma) {
  if (!(k >= 1.0)) fail(ErrorCode::DomainError, "value_bound: k must be >= 1");
  check_gamma(gamma);
  const double lead = kind == ActivationKind::ReLU ? std::log(2.0 / gamma) : std::log(1.0 / gamma);
  return std::sqrt(2.0 * lead) * (1.0 + std::sqrt(std::log(2.0 / gamma) / k));
}

double grad_lower_bound(ActivationKind kind, double k, double d, double gamma,
                        std::optional<double> c_psi_sq) {
  check_positive(k, "k");
  check_positive(d, "d");
  check_gamma(gamma, 2.0 / std::numbers::e);

  double inner = 0.0;
  double dim_factor = 0.0;
  if (kind == ActivationKind::ReLU) {
    inner = 0.5 - std::sqrt(2.0 * std::log(4.0 / gamma) / k) *
                      (1.0 + std::sqrt(std::log(1.0 / gamma) / k));
    dim_factor = 1.0 - 5.0 * std::sqrt(std::log(4.0 / gamma) / d);
  } else {
    const double c2 = c_psi_sq.value_or(gaussian_moment(Activation(kind), 1, 2));
    check_positive(c2, "c_psi_sq");
    inner = c2 - std::sqrt(2.0 * std::log(4.0 / gamma) / k) *
                     (1.0 + std::sqrt(std::log(4.0 / gamma) / k));
    dim_factor = 1.0 - 5.0 * std::sqrt(std::log(8.0 / gamma) / d);
  }
  if (inner <= 0.0 || dim_factor <= 0.0) return 0.0;  // vacuous regime
  return std::sqrt(inner) * dim_factor;
}

double grad_dev_bound_smooth(double radius, double lipschitz, double k, double d, double gamma) {
  if (!(radius >= 1.0)) fail(ErrorCode::DomainError, "grad_dev_bound_smooth: requires R >= 1");
  check_nonnegative(lipschitz, "L");
  check_positive(k, "k");
  check_positive(d, "d");
  check_gamma(gamma);
  return 20.0 * radius * lipschitz *
         (std::sqrt(std::log(k / gamma) / d) + std::log(1.0 / gamma) / std::sqrt(k));
}

double grad_dev_bound_relu(double radius, double k, double d, double gamma) {
  check_gamma(gamma);
  check_positive(d, "d");
  if (!(radius >= 1.0)) {
    fail(ErrorCode::PreconditionViolated, "grad_dev_bound_relu: hypothesis R >= 1 violated");
  }
  if (!(radius <= std::sqrt(d) / 2.0)) {
    fail(ErrorCode::PreconditionViolated, "grad_dev_bound_relu: hypothesis R <= sqrt(d)/2 violated");
  }
  if (!(std::sqrt(k) >= 52.0)) {
    fail(ErrorCode::PreconditionViolated, "grad_dev_bound_relu: hypothesis sqrt(k) >= 52 violated");
  }
  if (!(d >= std::log(1.0 / gamma))) {
    fail(ErrorCode::PreconditionViolated,
         "grad_dev_bound_relu: hypothesis d >= log(1/gamma) violated");
  }
  const double log_rk = std::log(radius * k);
  return 20.0 * std::pow(radius * log_rk * log_rk * std::sqrt(std::log(d) / d), 0.25) +
         40.0 * std::sqrt(d / k) * log_rk;
}

FlipProbBounds flip_prob_bounds(double radius, double d, double epsilon) {
  if (!(d >= 1.0)) fail(ErrorCode::DomainError, "flip_prob_bounds: d must be >= 1");
  check_nonnegative(radius, "R");
  if (radius > std::sqrt(d) / 2.0) {
    fail(ErrorCode::DomainError, "flip_prob_bounds: requires R <= sqrt(d)/2");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    fail(ErrorCode::DomainError, "flip_prob_bounds: epsilon outside (0, 1]");
  }
  return {radius * std::sqrt(2.0 * std::log(d) / d) + 1.0 / d,
          2.0 * epsilon * (1.0 + 2.0 * std::sqrt(std::log(2.0 / epsilon) / d))};
}

double per_sample_grad_dev_bound(ActivationKind kind, double radius, double d, double k,
                                 double gamma, double lipschitz) {
  check_positive(d, "d");
  check_positive(k, "k");
  check_gamma(gamma);
  const double lg = std::log(1.0 / gamma);
  if (kind == ActivationKind::ReLU) {
    if (!(radius >= 1.0)) fail(ErrorCode::DomainError, "per_sample_grad_dev_bound: ReLU requires R >= 1");
    return 2.0 * std::sqrt(lg / d) *
           (std::pow(2.0 * radius * std::sqrt(std::log(d) / d), 0.25) + std::sqrt(lg / k));
  }
  check_nonnegative(radius, "R");
  check_nonnegative(lipschitz, "L");
  return 4.0 * radius * lipschitz / d * std::sqrt(lg) * (1.0 + std::sqrt(lg / k));
}

double theorem_eta(ActivationKind /*kind*/, double gamma, double c3) {
  check_gamma(gamma);
  check_positive(c3, "c3");
  return c3 * std::sqrt(std::log(1.0 / gamma));
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

double BoundSpec::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) {
    fail(ErrorCode::InvalidArgument, "bound '" + name + "' needs parameter '" + key + "'");
  }
  return it->second;
}

double BoundSpec::param_or(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

namespace {

bool uses_network(const std::string& name) { return name != "bernstein" && name != "chisq"; }

// Statistics that depend on the activation; flip counts and the chi-square
// draws do not.
bool depends_on_activation(const std::string& name) {
  return uses_network(name) && name != "flip_prob_single";
}

}  // namespace

std::string BoundSpec::label() const {
  if (!depends_on_activation(name)) return name;
  return name + "/" + std::string(activation.name());
}

const std::vector<std::string>& known_bounds() {
  static const std::vector<std::string> names{
      "bernstein",          "chisq",         "value_bound",  "grad_lower_bound",
      "per_sample_grad_dev", "flip_prob_single", "grad_dev_smooth", "grad_dev_relu"};
  return names;
}

bool is_known_bound(const std::string& name) {
  const auto& names = known_bounds();
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

void require_known(const BoundSpec& spec) {
  if (!is_known_bound(spec.name)) fail(ErrorCode::UnknownBound, "unknown bound '" + spec.name + "'");
}

double lipschitz_or_zero(const Activation& a) {
  return a.is_smooth() ? a.lipschitz_of_derivative() : 0.0;
}

}  // namespace

double evaluate_bound(const BoundSpec& spec) {
  require_known(spec);
  const double gamma = spec.param("gamma");
  const auto kind = spec.activation.kind();
  const std::string& n = spec.name;
  if (n == "bernstein") {
    return bernstein_bound(spec.param_or("sigma", 1.0), spec.param_or("c", 1.0), spec.param("k"), gamma);
  }
  if (n == "chisq") return chisq_deviation_bound(spec.param("k"), gamma);
  if (n == "value_bound") return value_bound(kind, spec.param("k"), gamma);
  if (n == "grad_lower_bound") return grad_lower_bound(kind, spec.param("k"), spec.param("d"), gamma);
  if (n == "per_sample_grad_dev") {
    return per_sample_grad_dev_bound(kind, spec.param_or("R", 1.0), spec.param("d"), spec.param("k"),
                                     gamma, lipschitz_or_zero(spec.activation));
  }
  if (n == "flip_prob_single") return flip_prob_bounds(spec.param_or("R", 1.0), spec.param("d"), 1.0).single;
  if (n == "grad_dev_smooth") {
    if (!spec.activation.is_smooth()) fail(ErrorCode::NotSmooth, "grad_dev_smooth needs a smooth activation");
    return grad_dev_bound_smooth(spec.param_or("R", 1.0), spec.activation.lipschitz_of_derivative(),
                                 spec.param("k"), spec.param("d"), gamma);
  }
  return grad_dev_bound_relu(spec.param_or("R", 1.0), spec.param("k"), spec.param("d"), gamma);
}

bool exceeds(const BoundSpec& spec, double statistic, double bound_value) {
  if (spec.name == "grad_lower_bound") return statistic < bound_value;
  return statistic > bound_value;
}

namespace {

std::size_t size_param(const BoundSpec& spec, const char* key) {
  const double v = spec.param(key);
  if (!(v >= 1.0) || v != std::floor(v)) {
    fail(ErrorCode::InvalidDims, "bound '" + spec.name + "': " + key + " must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> sample_network_free(const BoundSpec& spec, std::size_t trials, std::uint64_t seed) {
  const std::size_t k = size_param(spec, "k");
  std::vector<double> out(trials);
  const bool chisq = spec.name == "chisq";
  parallel_for(trials, [&](std::size_t t) {
    Stream rng(seed, {stream_tag::kTrial, t, chisq ? 1u : 0u});
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (chisq) {
        const double z = rng.normal();
        sum += z * z;
      } else {
        sum += rng.sign();
      }
    }
    out[t] = chisq ? std::abs(sum - static_cast<double>(k)) : sum;
  });
  return out;
}

Vector unit_vector(std::size_t d, std::uint64_t key) {
  Stream rng(key);
  Vector u(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.normal();
  return u / u.norm();
}

// Network statistics for specs sharing (d, k, R). Every trial draws one set
// of weights; each spec evaluates it under its own activation.
std::vector<std::vector<double>> sample_network_group(std::span<const BoundSpec* const> specs,
                                                      std::size_t trials, std::uint64_t seed) {
  const BoundSpec& first = *specs.front();
  const std::size_t d = size_param(first, "d");
  const std::size_t k = size_param(first, "k");
  const double radius = first.param_or("R", 1.0);

  // Fixed probe geometry: only the network is random across trials.
  const Vector x = sample_input(d, derive_key(seed, {stream_tag::kInput, d})).coords;
  const Vector v = unit_vector(d, derive_key(seed, {stream_tag::kDirection, 0, d}));
  const Vector delta = radius * unit_vector(d, derive_key(seed, {stream_tag::kDirection, 1, d}));
  const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));

  std::vector<std::vector<double>> out(specs.size(), std::vector<double>(trials));
  parallel_for(trials, [&](std::size_t t) {
    const std::uint64_t net_key = derive_key(seed, {stream_tag::kTrial, t, stream_tag::kNet});
    const Network net = Network::sample(1, d, k, kReLU, net_key);
    const Matrix& w = net.layer(0);
    const Eigen::ArrayXd a = net.output_signs().array();
    const Eigen::ArrayXd z = (w * x).array();
    const Eigen::ArrayXd z_shift = (w * (x + delta)).array();
    const Eigen::ArrayXd wv = (w * v).array();

    for (std::size_t s = 0; s < specs.size(); ++s) {
      const BoundSpec& spec = *specs[s];
      const Activation& act = spec.activation;
      double stat = 0.0;
      if (spec.name == "value_bound") {
        stat = std::abs(inv_sqrt_k * (a * act.eval(z)).sum());
      } else if (spec.name == "grad_lower_bound") {
        stat = (w.transpose() * (inv_sqrt_k * a * act.deriv(z)).matrix()).norm();
      } else if (spec.name == "per_sample_grad_dev") {
        stat = inv_sqrt_k * (a * wv * (act.deriv(z) - act.deriv(z_shift))).sum();
      } else if (spec.name == "flip_prob_single") {
        std::size_t flips = 0;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
          if (sign_of(z[i]) != sign_of(z_shift[i])) ++flips;
        }
        stat = static_cast<double>(flips) / static_cast<double>(k);
      } else {
        // grad_dev_smooth / grad_dev_relu: sampled supremum over the ball.
        const Network view = Network::from_parts(net.hidden_weights(), net.output_signs(), act);
        stat = estimate_grad_deviation_sup(
            view, x, radius, static_cast<std::size_t>(spec.param_or("num_dirs", 8)),
            static_cast<std::size_t>(spec.param_or("num_radii", 2)),
            derive_key(net_key, {stream_tag::kDirection}));
      }
      out[s][t] = stat;
    }
  });
  return out;
}

}  // namespace

std::vector<std::vector<double>> sample_bound_statistics(std::span<const BoundSpec> specs,
                                                         std::size_t trials, std::uint64_t seed) {
  if (trials == 0) fail(ErrorCode::InvalidTrials, "trials must be at least 1");
  for (const auto& spec : specs) require_known(spec);

  std::vector<std::vector<double>> out(specs.size());
  std::vector<bool> done(specs.size(), false);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (done[i]) continue;
    if (!uses_network(specs[i].name)) {
      out[i] = sample_network_free(specs[i], trials, seed);
      done[i] = true;
      continue;
    }
    const auto key = std::make_tuple(specs[i].param("d"), specs[i].param("k"), specs[i].param_or("R", 1.0));
    std::vector<std::size_t> members;
    std::vector<const BoundSpec*> group;
    for (std::size_t j = i; j < specs.size(); ++j) {
      if (done[j] || !uses_network(specs[j].name)) continue;
      if (std::make_tuple(specs[j].param("d"), specs[j].param("k"), specs[j].param_or("R", 1.0)) == key) {
        members.push_back(j);
        group.push_back(&specs[j]);
      }
    }
    auto samples = sample_network_group(group, trials, seed);
    for (std::size_t m = 0; m < members.size(); ++m) {
      out[members[m]] = std::move(samples[m]);
      done[members[m]] = true;
    }
  }
  return out;
}

std::vector<double> sample_bound_statistic(const BoundSpec& spec, std::size_t trials,
                                           std::uint64_t seed) {
  return std::move(sample_bound_statistics(std::span(&spec, 1), trials, seed).front());
}

BoundReport report_from_samples(const BoundSpec& spec, const std::vector<double>& samples) {
  if (samples.empty()) fail(ErrorCode::InvalidTrials, "trials must be at least 1");
  BoundReport report;
  report.name = spec.name;
  report.activation = depends_on_activation(spec.name) ? std::string(spec.activation.name()) : "";
  report.params = spec.params;
  report.bound_value = evaluate_bound(spec);
  const std::size_t violations = static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(),
      [&](double s) { return exceeds(spec, s, report.bound_value); }));
  report.trials = samples.size();
  report.empirical_exceed_rate = static_cast<double>(violations) / static_cast<double>(samples.size());
  const double gamma = spec.param("gamma");
  report.pass = report.empirical_exceed_rate <= gamma + binomial_slack(gamma, report.trials);
  return report;
}

BoundReport verify_bound(const BoundSpec& spec, std::size_t trials, std::uint64_t seed) {
  require_known(spec);
  if (trials == 0) fail(ErrorCode::InvalidTrials, "trials must be at least 1");
  evaluate_bound(spec);  // surface domain errors before sampling
  return report_from_samples(spec, sample_bound_statistic(spec, trials, seed));
}

}  // namespace advland
