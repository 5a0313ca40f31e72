#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "advland/attack.hpp"
#include "advland/bounds.hpp"
#include "advland/landscape.hpp"

namespace advland {

using Json = nlohmann::ordered_json;

Json to_json(const AttackOutcome& outcome);
Json to_json(const Trajectory& trajectory);
/// {quantity, d, k, R, trials, mean, std, quantiles: {p: value}}
Json to_json(const LandscapeStats& stats);
Json to_json(const BoundReport& report);

/// Quantile levels reported in LandscapeStats JSON.
const std::vector<double>& reported_quantiles();

}  // namespace advland
