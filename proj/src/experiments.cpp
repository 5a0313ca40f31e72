#include "advland/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "advland/attack.hpp"
#include "advland/error.hpp"
#include "advland/network.hpp"
#include "advland/parallel.hpp"
#include "advland/rng.hpp"
#include "advland/serialize.hpp"
#include "advland/stats.hpp"

namespace advland {

namespace {

struct CaseResult {
  double grad_norm = 0.0;
  std::optional<double> eta;  // |eta| when flipped
  bool zero_gradient = false;
};

SweepResult run_cell(const SweepConfig& config, std::size_t d, std::size_t k, std::size_t L) {
  const std::size_t nets = config.nets_per_cell;
  const std::size_t inputs = config.inputs_per_net;
  std::vector<CaseResult> cases(nets * inputs);

  parallel_for(nets, [&](std::size_t n) {
    const auto net = Network::sample(
        L, d, k, config.activation, derive_key(config.seed, {stream_tag::kNet, d, k, L, n}));
    for (std::size_t j = 0; j < inputs; ++j) {
      const auto x = sample_input(d, derive_key(config.seed, {stream_tag::kInput, d, k, L, n, j}));
      CaseResult& out = cases[n * inputs + j];
      out.grad_norm = net.gradient(x.coords).norm();
      if (out.grad_norm < kZeroGradientNorm) {
        out.zero_gradient = true;
        continue;
      }
      if (auto eta = smallest_flip_eta(net, x.coords, config.eta_max, config.grid)) {
        out.eta = std::abs(*eta);
      }
    }
  });

  SweepResult r;
  r.d = d;
  r.k = k;
  r.L = L;
  r.n_total = cases.size();
  RunningStats eta_stats;
  RunningStats grad_stats;
  for (const auto& c : cases) {
    grad_stats.push(c.grad_norm);
    if (c.zero_gradient) ++r.n_zero_gradient;
    if (c.eta) {
      ++r.n_flipped;
      eta_stats.push(*c.eta);
    }
  }
  r.fraction_flipped = static_cast<double>(r.n_flipped) / static_cast<double>(r.n_total);
  r.mean_smallest_eta = eta_stats.mean;
  r.std_smallest_eta = eta_stats.stddev();
  r.mean_grad_norm = grad_stats.mean;
  r.std_grad_norm = grad_stats.stddev();
  return r;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double field_double(const std::string& s, std::size_t line_no) {
  if (s.empty()) return 0.0;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::ParseError, "csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
}

std::size_t field_count(const std::string& s, std::size_t line_no) {
  const double v = field_double(s, line_no);
  if (s.empty() || v < 0 || v != std::floor(v)) {
    fail(ErrorCode::ParseError, "csv line " + std::to_string(line_no) + ": bad count '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<SweepResult> run_sweep(const SweepConfig& config) {
  config.validate();
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> cells;
  for (std::size_t d : config.d_values) {
    for (std::size_t k : config.k_values) {
      for (std::size_t L : config.L_values) cells.emplace_back(d, k, L);
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  std::vector<SweepResult> results;
  results.reserve(cells.size());
  for (const auto& [d, k, L] : cells) results.push_back(run_cell(config, d, k, L));
  return results;
}

std::string format_csv(const std::vector<SweepResult>& results) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const auto& r : results) {
    out += std::to_string(r.d) + ',' + std::to_string(r.k) + ',' + std::to_string(r.L) + ',' +
           std::to_string(r.n_total) + ',' + std::to_string(r.n_flipped) + ',' +
           format_number(r.fraction_flipped) + ',';
    if (r.n_flipped > 0) {
      out += format_number(r.mean_smallest_eta) + ',' + format_number(r.std_smallest_eta);
    } else {
      out += ',';
    }
    out += ',' + format_number(r.mean_grad_norm) + ',' + format_number(r.std_grad_norm) + '\n';
  }
  return out;
}

void emit_csv(const std::vector<SweepResult>& results, const std::filesystem::path& path) {
  if (results.empty()) fail(ErrorCode::InvalidArgument, "no sweep results to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  const std::string text = format_csv(results);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<SweepResult> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    fail(ErrorCode::ParseError, "csv header does not match the sweep schema");
  }
  std::vector<SweepResult> results;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 10) {
      fail(ErrorCode::ParseError, "csv line " + std::to_string(line_no) + ": expected 10 fields");
    }
    SweepResult r;
    r.d = field_count(f[0], line_no);
    r.k = field_count(f[1], line_no);
    r.L = field_count(f[2], line_no);
    r.n_total = field_count(f[3], line_no);
    r.n_flipped = field_count(f[4], line_no);
    r.fraction_flipped = field_double(f[5], line_no);
    r.mean_smallest_eta = field_double(f[6], line_no);
    r.std_smallest_eta = field_double(f[7], line_no);
    r.mean_grad_norm = field_double(f[8], line_no);
    r.std_grad_norm = field_double(f[9], line_no);
    results.push_back(r);
  }
  return results;
}

const std::vector<std::string>& default_bound_suite() {
  static const std::vector<std::string> suite{
      "value_bound/relu",         "value_bound/tanh",         "grad_lower_bound/relu",
      "grad_lower_bound/tanh",    "chisq",                    "per_sample_grad_dev/relu",
      "per_sample_grad_dev/tanh", "flip_prob_single"};
  return suite;
}

BoundSpec suite_spec(const std::string& label, std::size_t size) {
  if (size == 0) fail(ErrorCode::InvalidDims, "bound suite size must be positive");
  const auto slash = label.find('/');
  BoundSpec spec;
  spec.name = label.substr(0, slash);
  if (!is_known_bound(spec.name)) fail(ErrorCode::UnknownBound, "unknown bound '" + label + "'");
  if (slash != std::string::npos) {
    const auto kind = parse_activation(label.substr(slash + 1));
    if (!kind) fail(ErrorCode::UnknownBound, "unknown activation in bound label '" + label + "'");
    spec.activation = Activation(*kind);
  }
  const double n = static_cast<double>(size);
  const bool doubled_d = spec.name == "per_sample_grad_dev" && !spec.activation.is_smooth();
  spec.params["d"] = doubled_d ? 2.0 * n : n;
  spec.params["k"] = n;
  spec.params["R"] = 1.0;
  return spec;
}

std::vector<BoundReport> run_bound_suite(const BoundSuiteConfig& config,
                                         const std::optional<std::filesystem::path>& path) {
  if (config.trials == 0) fail(ErrorCode::InvalidTrials, "trials must be at least 1");
  if (config.gammas.empty() || config.sizes.empty()) {
    fail(ErrorCode::InvalidArgument, "bound suite needs at least one gamma and one size");
  }
  const auto& labels = config.bounds.empty() ? default_bound_suite() : config.bounds;

  std::ofstream out;
  if (path) {
    out.open(*path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path->string() + " for writing");
  }

  std::vector<BoundReport> reports;
  for (std::size_t size : config.sizes) {
    std::vector<BoundSpec> specs;
    for (const auto& label : labels) specs.push_back(suite_spec(label, size));
    for (std::size_t i = 0; i < specs.size(); ++i) {
      for (double gamma : config.gammas) {
        specs[i].params["gamma"] = gamma;
        evaluate_bound(specs[i]);  // reject bad gamma or preconditions before sampling
      }
      specs[i].params.erase("gamma");
    }
    const auto samples = sample_bound_statistics(specs, config.trials, config.seed);
    for (std::size_t i = 0; i < specs.size(); ++i) {
      for (double gamma : config.gammas) {
        BoundSpec spec = specs[i];
        spec.params["gamma"] = gamma;
        reports.push_back(report_from_samples(spec, samples[i]));
        if (out.is_open()) out << to_json(reports.back()).dump() << '\n';
      }
    }
  }
  if (out.is_open()) {
    out.flush();
    if (!out) fail(ErrorCode::IoError, "failed writing " + path->string());
  }
  return reports;
}

}  // namespace advland
