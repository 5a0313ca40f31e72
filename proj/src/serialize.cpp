#include "advland/serialize.hpp"

#include <cstdio>

namespace advland {

const std::vector<double>& reported_quantiles() {
  static const std::vector<double> levels{0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};
  return levels;
}

Json to_json(const AttackOutcome& outcome) {
  Json j;
  j["eta"] = outcome.eta;
  j["perturbation_norm"] = outcome.perturbation_norm;
  j["value_before"] = outcome.value_before;
  j["value_after"] = outcome.value_after;
  j["flipped"] = outcome.flipped;
  return j;
}

Json to_json(const Trajectory& trajectory) {
  Json steps = Json::array();
  for (const auto& s : trajectory.steps) steps.push_back(to_json(s));
  Json j;
  j["steps"] = std::move(steps);
  j["flipped"] = trajectory.flipped;
  j["zero_gradient"] = trajectory.zero_gradient;
  return j;
}

Json to_json(const LandscapeStats& stats) {
  Json j;
  j["quantity"] = std::string(quantity_name(stats.quantity));
  j["d"] = stats.params.d;
  j["k"] = stats.params.k;
  j["R"] = stats.params.radius ? Json(*stats.params.radius) : Json(nullptr);
  j["trials"] = stats.samples;
  j["mean"] = stats.mean;
  j["std"] = stats.std;
  Json q = Json::object();
  for (double p : reported_quantiles()) {
    char key[16];
    std::snprintf(key, sizeof key, "%g", p);
    q[key] = stats.sorted_values.empty() ? Json(nullptr) : Json(stats.quantile(p));
  }
  j["quantiles"] = std::move(q);
  return j;
}

Json to_json(const BoundReport& report) {
  Json j;
  j["name"] = report.name;
  if (!report.activation.empty()) j["activation"] = report.activation;
  Json params = Json::object();
  for (const auto& [key, value] : report.params) params[key] = value;
  j["params"] = std::move(params);
  j["bound_value"] = report.bound_value;
  j["empirical_exceed_rate"] = report.empirical_exceed_rate;
  j["trials"] = report.trials;
  j["pass"] = report.pass;
  return j;
}

}  // namespace advland
