#include <doctest.h>

#include <cmath>
#include <numbers>

#include "advland/bounds.hpp"
#include "advland/error.hpp"

using namespace advland;
using std::log;
using std::sqrt;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an advland::Error");
  return ErrorCode::InvalidArgument;
}

const double kE = std::numbers::e;

}  // namespace

TEST_CASE("Bernstein and chi-square arithmetic") {
  CHECK(bernstein_bound(1, 1, 100, 1 / kE) == doctest::Approx(sqrt(200.0) + 1.0).epsilon(1e-14));
  CHECK(bernstein_bound(1, 1, 100, 1 / kE) == doctest::Approx(15.142).epsilon(1e-4));
  CHECK(bernstein_bound(1, 1, 100, 1 - 1e-12) > 0.0);
  CHECK(bernstein_bound(1, 1, 100, 1 - 1e-12) < 1e-4);
  CHECK(chisq_deviation_bound(100, 2 / kE) == doctest::Approx(40.0).epsilon(1e-14));
  CHECK(code_of([] { chisq_deviation_bound(100, 0.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { chisq_deviation_bound(100, 1.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { bernstein_bound(1, 1, 0, 0.1); }) == ErrorCode::DomainError);
}

TEST_CASE("value bound") {
  CHECK(value_bound(ActivationKind::ReLU, 1e300, 2 / kE) == doctest::Approx(sqrt(2.0)).epsilon(1e-12));
  const double k = 1000, g = 0.05;
  CHECK(value_bound(ActivationKind::Tanh, k, g) ==
        doctest::Approx(sqrt(2 * log(1 / g)) * (1 + sqrt(log(2 / g) / k))).epsilon(1e-14));
  CHECK(value_bound(ActivationKind::ReLU, k, g) ==
        doctest::Approx(sqrt(2 * log(2 / g)) * (1 + sqrt(log(2 / g) / k))).epsilon(1e-14));
}

TEST_CASE("gradient lower bound") {
  CHECK(grad_lower_bound(ActivationKind::ReLU, 1e300, 1e300, 0.1) ==
        doctest::Approx(sqrt(0.5)).epsilon(1e-9));
  CHECK(grad_lower_bound(ActivationKind::ReLU, 10, 1000, 0.05) == 0.0);
  CHECK(grad_lower_bound(ActivationKind::Tanh, 1000, 20, 0.05) == 0.0);
  const double k = 1000, d = 1000, g = 0.05;
  const double relu = sqrt(0.5 - sqrt(2 * log(4 / g) / k) * (1 + sqrt(log(1 / g) / k))) *
                      (1 - 5 * sqrt(log(4 / g) / d));
  CHECK(grad_lower_bound(ActivationKind::ReLU, k, d, g) == doctest::Approx(relu).epsilon(1e-14));
  const double c2 = 0.4;
  const double smooth = sqrt(c2 - sqrt(2 * log(4 / g) / k) * (1 + sqrt(log(4 / g) / k))) *
                        (1 - 5 * sqrt(log(8 / g) / d));
  CHECK(grad_lower_bound(ActivationKind::Tanh, k, d, g, c2) == doctest::Approx(smooth).epsilon(1e-14));
  CHECK(code_of([] { grad_lower_bound(ActivationKind::ReLU, 100, 100, 0.8); }) == ErrorCode::DomainError);
}

TEST_CASE("gradient deviation bounds") {
  CHECK(grad_dev_bound_smooth(1, 0.0, 100, 100, 0.1) == 0.0);
  const double r = 2, lip = 0.7698, k = 2000, d = 2000, g = 0.01;
  CHECK(grad_dev_bound_smooth(r, lip, k, d, g) ==
        doctest::Approx(20 * r * lip * (sqrt(log(k / g) / d) + log(1 / g) / sqrt(k))).epsilon(1e-14));
  CHECK(code_of([] { grad_dev_bound_smooth(0.5, 1, 100, 100, 0.1); }) == ErrorCode::DomainError);

  const double n = 1e4;
  const double expected = 20 * std::pow(log(n) * log(n) * sqrt(log(n) / n), 0.25) + 40 * log(n);
  CHECK(grad_dev_bound_relu(1, n, n, 0.01) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(code_of([] { grad_dev_bound_relu(1, 51 * 51, 1e4, 0.01); }) == ErrorCode::PreconditionViolated);
  CHECK(code_of([] { grad_dev_bound_relu(0.5, 1e4, 1e4, 0.01); }) == ErrorCode::PreconditionViolated);
  CHECK(code_of([] { grad_dev_bound_relu(60, 1e4, 1e4, 0.01); }) == ErrorCode::PreconditionViolated);
  CHECK(code_of([] { grad_dev_bound_relu(1, 1e4, 4, 1e-3); }) == ErrorCode::PreconditionViolated);
  CHECK_NOTHROW(grad_dev_bound_relu(1, 52 * 52, 1e4, 0.01));
}

TEST_CASE("flip probability and per-sample bounds") {
  const auto fp = flip_prob_bounds(1, 1000, 0.5);
  CHECK(fp.single == doctest::Approx(sqrt(2 * log(1000.0) / 1000) + 0.001).epsilon(1e-14));
  CHECK(fp.single == doctest::Approx(0.1185).epsilon(1e-3));
  CHECK(fp.ball == doctest::Approx(2 * 0.5 * (1 + 2 * sqrt(log(4.0) / 1000))).epsilon(1e-14));
  CHECK(flip_prob_bounds(1, 1000, 1e-12).ball < 1e-11);
  CHECK(code_of([] { flip_prob_bounds(20, 1000, 0.5); }) == ErrorCode::DomainError);
  CHECK(code_of([] { flip_prob_bounds(1, 1000, 0.0); }) == ErrorCode::DomainError);

  CHECK(per_sample_grad_dev_bound(ActivationKind::Tanh, 3, 100, 100, 0.1, 0.0) == 0.0);
  const double r = 1, d = 2000, k = 1000, g = 0.05, lg = log(1 / g);
  CHECK(per_sample_grad_dev_bound(ActivationKind::ReLU, r, d, k, g) ==
        doctest::Approx(2 * sqrt(lg / d) * (std::pow(2 * r * sqrt(log(d) / d), 0.25) + sqrt(lg / k)))
            .epsilon(1e-14));
  CHECK(per_sample_grad_dev_bound(ActivationKind::Tanh, r, d, k, g, 0.5) ==
        doctest::Approx(4 * r * 0.5 / d * sqrt(lg) * (1 + sqrt(lg / k))).epsilon(1e-14));
  CHECK(code_of([] { per_sample_grad_dev_bound(ActivationKind::ReLU, 0.5, 100, 100, 0.1); }) ==
        ErrorCode::DomainError);
  double prev = 1e300;
  for (double dd : {100.0, 200.0, 400.0, 800.0, 1600.0}) {
    const double v = per_sample_grad_dev_bound(ActivationKind::ReLU, 1, dd, 1000, 0.05);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("step-size constant") {
  CHECK(theorem_eta(ActivationKind::Tanh, 1 / kE, 2) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(theorem_eta(ActivationKind::ReLU, 0.01, 3) == doctest::Approx(6.44).epsilon(1e-3));
}

TEST_CASE("monotonicity in gamma (property)") {
  // Upper bounds shrink as gamma grows; the gradient lower bound grows.
  for (int i = 0; i < 200; ++i) {
    const double k = 50.0 + 37.0 * i;
    const double d = 40.0 + 23.0 * i;
    const double g1 = 0.001 + 0.6 * (i % 17) / 17.0;
    const double g2 = g1 * 1.1;
    CHECK(bernstein_bound(1, 1, k, g2) < bernstein_bound(1, 1, k, g1));
    CHECK(chisq_deviation_bound(k, g2) < chisq_deviation_bound(k, g1));
    for (auto kind : {ActivationKind::ReLU, ActivationKind::Tanh}) {
      CHECK(value_bound(kind, k, g2) < value_bound(kind, k, g1));
      CHECK(per_sample_grad_dev_bound(kind, 1, d, k, g2, 0.77) <
            per_sample_grad_dev_bound(kind, 1, d, k, g1, 0.77));
      const double lo1 = grad_lower_bound(kind, k, d, g1);
      const double lo2 = grad_lower_bound(kind, k, d, g2);
      if (lo1 > 0.0) CHECK(lo2 > lo1);
      CHECK(lo2 >= lo1);
    }
    CHECK(grad_dev_bound_smooth(1, 0.77, k, d, g2) < grad_dev_bound_smooth(1, 0.77, k, d, g1));
  }
}

TEST_CASE("bound specs and reports") {
  BoundSpec spec{"value_bound", kTanh, {{"k", 300}, {"d", 300}, {"gamma", 0.05}}};
  CHECK(spec.label() == "value_bound/tanh");
  CHECK(BoundSpec{"chisq", kTanh, {}}.label() == "chisq");
  CHECK(BoundSpec{"flip_prob_single", kTanh, {}}.label() == "flip_prob_single");
  CHECK(evaluate_bound(spec) == value_bound(ActivationKind::Tanh, 300, 0.05));
  CHECK(is_known_bound("grad_dev_relu"));
  CHECK_FALSE(is_known_bound("nope"));

  CHECK(code_of([&] { verify_bound(spec, 0, 1); }) == ErrorCode::InvalidTrials);
  CHECK(code_of([] { verify_bound(BoundSpec{"nope", kReLU, {{"gamma", 0.1}}}, 10, 1); }) ==
        ErrorCode::UnknownBound);
  CHECK(code_of([] { verify_bound(BoundSpec{"chisq", kReLU, {{"gamma", 0.1}}}, 10, 1); }) ==
        ErrorCode::InvalidArgument);

  const auto report = report_from_samples(spec, {0.0, 10.0, 0.5, 0.1});
  CHECK(report.empirical_exceed_rate == 0.25);
  CHECK(report.trials == 4);
  CHECK(report.activation == "tanh");
  CHECK(report.pass == (0.25 <= 0.05 + 2 * sqrt(0.05 * 0.95 / 4)));

  BoundSpec lower{"grad_lower_bound", kReLU, {{"k", 1000}, {"d", 1000}, {"gamma", 0.05}}};
  CHECK(exceeds(lower, 0.1, 0.2));
  CHECK_FALSE(exceeds(lower, 0.3, 0.2));
  CHECK(exceeds(spec, 3.0, 2.0));
}

TEST_CASE("batched sampling equals sampling each spec alone") {
  std::vector<BoundSpec> specs{
      {"value_bound", kReLU, {{"k", 60}, {"d", 40}}},
      {"grad_lower_bound", kTanh, {{"k", 60}, {"d", 40}}},
      {"chisq", kReLU, {{"k", 60}}},
      {"per_sample_grad_dev", kReLU, {{"k", 60}, {"d", 80}}},
      {"flip_prob_single", kReLU, {{"k", 60}, {"d", 40}}},
      {"grad_dev_smooth", kTanh, {{"k", 60}, {"d", 40}, {"R", 2}}},
  };
  const auto batched = sample_bound_statistics(specs, 30, 9);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CHECK(batched[i] == sample_bound_statistic(specs[i], 30, 9));
  }
  CHECK(batched[2] != sample_bound_statistic(specs[2], 30, 10));
}

TEST_CASE("small-scale exceedance checks pass") {
  for (double g : {0.05, 0.2}) {
    CHECK(verify_bound({"chisq", kReLU, {{"k", 500}, {"gamma", g}}}, 10000, 1).pass);
    CHECK(verify_bound({"bernstein", kReLU, {{"k", 200}, {"gamma", g}}}, 10000, 2).pass);
  }
}
