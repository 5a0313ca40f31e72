// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Tolerances and time limits are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "advland/attack.hpp"
#include "advland/bounds.hpp"
#include "advland/experiments.hpp"
#include "advland/landscape.hpp"
#include "advland/network.hpp"
#include "advland/rng.hpp"
#include "advland/stats.hpp"

using namespace advland;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Verdict& v) {
  std::printf("%s [%d] %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Central-difference gradient, the oracle for criterion 9.
Vector fd_gradient(const Network& net, const Vector& x, double h) {
  Vector g(x.size());
  Vector p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double up = net.forward(p);
    p[i] = x[i] - h;
    const double down = net.forward(p);
    p[i] = x[i];
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

double min_abs_preactivation(const Network& net, const Vector& x) {
  double lowest = INFINITY;
  Vector h = x;
  for (std::size_t j = 0; j < net.depth(); ++j) {
    const Vector z = net.layer(j) * h;
    lowest = std::min(lowest, z.cwiseAbs().minCoeff());
    h = z.cwiseMax(0.0);
  }
  return lowest;
}

// Dense Hessian from differences of the analytic gradient, then a full
// symmetric eigensolve: the independent route for criterion 4.
double dense_hessian_opnorm(const Network& net, const Vector& x) {
  const double h = 1e-5;
  const Eigen::Index d = x.size();
  Matrix hess(d, d);
  Vector p = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    p[i] = x[i] + h;
    const Vector up = net.gradient(p);
    p[i] = x[i] - h;
    const Vector down = net.gradient(p);
    p[i] = x[i];
    hess.col(i) = (up - down) / (2 * h);
  }
  const Matrix sym = 0.5 * (hess + hess.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// 1. Saturation of the single-step attack.
void saturation() {
  const auto start = Clock::now();
  SweepConfig c;
  c.d_values = {500};
  c.k_values = {500};
  c.L_values = {1};
  c.activation = kReLU;
  c.nets_per_cell = 100;
  c.inputs_per_net = 100;
  c.eta_max = 20;
  c.seed = 1001;
  const auto r = run_sweep(c).front();
  const double t = seconds_since(start);
  report(1, "saturation (ReLU d=k=500, |eta|<=20)",
         {r.fraction_flipped >= 0.99 && t <= 120.0,
          fmt("fraction_flipped=%.4f over %zu cases (need >= 0.99), %.1f s (limit 120 s)",
              r.fraction_flipped, r.n_total, t)});
}

// 2 and 3 share one pass over 10^4 (network, input) pairs.
void value_and_gradient_scale() {
  const auto start = Clock::now();
  const auto [values, norms] = estimate_value_and_gradient(1000, 1000, kReLU, 10000, 2002);
  const double t = seconds_since(start);
  report(2, "gradient norm (ReLU d=k=1000, 1e4 trials)",
         {norms.mean >= 0.68 && norms.mean <= 0.74 && t <= 60.0,
          fmt("mean ||grad f||=%.4f (need [0.68, 0.74]), shared pass %.1f s (limit 60 s)", norms.mean, t)});
  // f is symmetric about 0, so Var f = E[f^2] = mean(|f|^2).
  const double var = values.mean_square();
  report(3, "value scale (ReLU d=k=1000, 1e4 trials)",
         {var >= 0.45 && var <= 0.55 && t <= 60.0,
          fmt("Var f = E[f^2]=%.4f (need [0.45, 0.55]), shared pass %.1f s (limit 60 s)", var, t)});
}

// 4. Hessian operator norm decays with d, and matches a dense eigensolve at small d.
void hessian_decay() {
  const auto start = Clock::now();
  LandscapeRequest req;
  req.quantity = Quantity::HessianOpnorm;
  req.activation = kTanh;
  req.k = 2000;
  req.trials = 100;
  req.iterations = 100;
  req.seed = 4004;
  req.d = 256;
  const double small_d = estimate_landscape(req).quantile(0.5);
  req.d = 1024;
  const double large_d = estimate_landscape(req).quantile(0.5);
  const double ratio = small_d / large_d;

  double worst = 0.0;
  int cases = 0;
  for (std::size_t d : {3, 10, 20, 35, 50}) {
    for (std::uint64_t s = 0; s < 4; ++s) {
      const std::size_t k = 30 + 40 * s;
      const auto net = Network::sample(1, d, k, kTanh, derive_key(4005, {d, s}));
      const Vector x = sample_input(d, derive_key(4006, {d, s})).coords;
      const double oracle = dense_hessian_opnorm(net, x);
      const double est = estimate_hessian_opnorm(net, x, 5000, s);
      worst = std::max(worst, std::abs(est - oracle) / oracle);
      ++cases;
    }
  }
  const double t = seconds_since(start);
  report(4, "Hessian decay (tanh k=2000, d=256 vs 1024)",
         {ratio >= 1.6 && ratio <= 2.6 && worst <= 1e-3 && t <= 300.0,
          fmt("median ratio=%.3f (need [1.6, 2.6]); dense-oracle max rel err %.2e over %d cases "
              "(need <= 1e-3); %.1f s (limit 300 s)",
              ratio, worst, cases, t)});
}

// 5. Empirical exceedance of the concentration bounds.
void bound_suite() {
  const auto start = Clock::now();
  BoundSuiteConfig config;
  config.gammas = {0.05, 0.2};
  config.sizes = {1000};
  config.trials = 10000;
  config.seed = 5005;
  const auto reports = run_bound_suite(config, std::nullopt);
  const double t = seconds_since(start);
  bool all = true;
  std::string detail;
  for (const auto& r : reports) {
    all = all && r.pass;
    const double gamma = r.params.at("gamma");
    detail += fmt("\n    %s %-26s gamma=%.2f bound=%.5g exceed=%.4f allow=%.4f",
                  r.pass ? "ok  " : "FAIL",
                  (r.name + (r.activation.empty() ? "" : "/" + r.activation)).c_str(), gamma,
                  r.bound_value, r.empirical_exceed_rate, gamma + binomial_slack(gamma, r.trials));
  }
  report(5, "bound-exceedance suite (1e4 trials)",
         {all && t <= 600.0, fmt("%zu reports, %.1f s (limit 600 s)", reports.size(), t) + detail});
}

// 6. Gradient-descent lemma holds numerically.
void descent_lemma() {
  const auto start = Clock::now();
  const std::size_t cases = 1000;
  std::size_t holds = 0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < cases; ++i) {
    const auto net = Network::sample(1, 500, 500, kTanh, derive_key(6006, {i}));
    const Vector x = sample_input(500, derive_key(6007, {i})).coords;
    Stream rng(6008, {i});
    const double eta = -3.0 + 6.0 * rng.uniform();
    const auto c = check_gradient_descent_lemma(net, x, eta);
    if (c.lhs <= c.rhs) ++holds;
    if (c.rhs > 0) worst_ratio = std::max(worst_ratio, c.lhs / c.rhs);
  }
  const double t = seconds_since(start);
  report(6, "gradient-descent lemma (tanh d=k=500, eta in [-3,3])",
         {holds == cases && t <= 120.0,
          fmt("lhs <= rhs in %zu/%zu cases (need all), max lhs/rhs=%.3f, %.1f s (limit 120 s)", holds,
              cases, worst_ratio, t)});
}

// 7. Smallest flipping step and gradient norm are flat in d.
void flatness() {
  const auto start = Clock::now();
  SweepConfig c;
  c.d_values = {100, 300, 1000};
  c.k_values = {1000};
  c.L_values = {1};
  c.activation = kReLU;
  c.nets_per_cell = 100;
  c.inputs_per_net = 10;
  c.seed = 7007;
  const auto rows = run_sweep(c);
  double eta_lo = INFINITY, eta_hi = 0, g_lo = INFINITY, g_hi = 0;
  std::string cells;
  for (const auto& r : rows) {
    eta_lo = std::min(eta_lo, r.mean_smallest_eta);
    eta_hi = std::max(eta_hi, r.mean_smallest_eta);
    g_lo = std::min(g_lo, r.mean_grad_norm);
    g_hi = std::max(g_hi, r.mean_grad_norm);
    cells += fmt(" d=%zu: eta=%.3f grad=%.3f flipped=%zu/%zu;", r.d, r.mean_smallest_eta,
                 r.mean_grad_norm, r.n_flipped, r.n_total);
  }
  const bool all_flipped = std::all_of(rows.begin(), rows.end(), [](const SweepResult& r) { return r.n_flipped > 0; });
  const double eta_ratio = eta_hi / eta_lo;
  const double g_ratio = g_hi / g_lo;
  const double t = seconds_since(start);
  report(7, "flatness in d (ReLU k=1000, d in {100,300,1000})",
         {all_flipped && eta_ratio <= 1.5 && g_ratio <= 1.2,
          fmt("eta max/min=%.3f (need <= 1.5), grad max/min=%.3f (need <= 1.2), %.1f s;", eta_ratio,
              g_ratio, t) +
              cells});
}

// 8. The input-independent direction also flips most inputs.
void universal_perturbation() {
  const auto start = Clock::now();
  const std::size_t trials = 1000;
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto net = Network::sample(1, 500, 500, kReLU, derive_key(8008, {i}));
    const Vector x = sample_input(500, derive_key(8009, {i})).coords;
    if (universal_flip_eta(net, x, 20.0, 400)) ++flipped;
  }
  const double frac = static_cast<double>(flipped) / trials;
  report(8, "universal perturbation (ReLU d=k=500, |eta|<=20)",
         {frac >= 0.90, fmt("flip fraction=%.4f (need >= 0.90), %.1f s", frac, seconds_since(start))});
}

// 9. Analytic gradients agree with central differences.
void gradient_correctness() {
  const auto start = Clock::now();
  double worst_smooth = 0.0, worst_relu = 0.0;
  int smooth_cases = 0, relu_cases = 0;
  const double h = 1e-6;
  for (std::uint64_t i = 0; smooth_cases < 100 || relu_cases < 100; ++i) {
    const bool smooth = i % 2 == 0;
    if ((smooth && smooth_cases >= 100) || (!smooth && relu_cases >= 100)) continue;
    Stream rng(9009, {i});
    const std::size_t d = 2 + rng() % 150;
    const std::size_t k = 1 + rng() % 200;
    const std::size_t depth = 1 + rng() % 3;
    const auto net = Network::sample(depth, d, k, smooth ? kTanh : kReLU, derive_key(9010, {i}));
    const Vector x = sample_input(d, derive_key(9011, {i})).coords;
    if (!smooth && min_abs_preactivation(net, x) <= 10 * h) continue;  // too close to a kink
    const Vector g = net.gradient(x);
    if (g.norm() == 0.0) continue;  // every unit off: nothing to compare
    const double err = (g - fd_gradient(net, x, h)).norm() / g.norm();
    if (smooth) {
      worst_smooth = std::max(worst_smooth, err);
      ++smooth_cases;
    } else {
      worst_relu = std::max(worst_relu, err);
      ++relu_cases;
    }
  }
  report(9, "gradient vs finite differences",
         {worst_smooth <= 1e-5 && worst_relu <= 1e-5,
          fmt("max rel err smooth=%.2e (%d cases), relu=%.2e (%d cases), need <= 1e-5, %.1f s",
              worst_smooth, smooth_cases, worst_relu, relu_cases, seconds_since(start))});
}

// 10. Two runs of the same sweep give byte-identical CSV.
void determinism() {
  const auto start = Clock::now();
  SweepConfig c;
  c.d_values = {50, 120};
  c.k_values = {60, 150};
  c.L_values = {1, 3};
  c.nets_per_cell = 10;
  c.inputs_per_net = 10;
  c.seed = 1010;
  const auto dir = std::filesystem::temp_directory_path() / "advland_acceptance";
  std::filesystem::create_directories(dir);

  const char* old = std::getenv("ADVLAND_THREADS");
  const std::string saved = old ? old : "";
  setenv("ADVLAND_THREADS", "1", 1);
  emit_csv(run_sweep(c), dir / "first.csv");
  setenv("ADVLAND_THREADS", "4", 1);
  emit_csv(run_sweep(c), dir / "second.csv");
  if (old) {
    setenv("ADVLAND_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("ADVLAND_THREADS");
  }
  const std::string a = read_file(dir / "first.csv");
  const std::string b = read_file(dir / "second.csv");
  std::filesystem::remove_all(dir);
  report(10, "sweep determinism",
         {!a.empty() && a == b,
          fmt("%zu bytes vs %zu bytes, %s (1 vs 4 threads), %.1f s", a.size(), b.size(),
              a == b ? "identical" : "different", seconds_since(start))});
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> checks{
      saturation, value_and_gradient_scale, hessian_decay, bound_suite, descent_lemma,
      flatness,   universal_perturbation,   gradient_correctness, determinism};
  for (const auto& check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      std::printf("FAIL (exception) %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
