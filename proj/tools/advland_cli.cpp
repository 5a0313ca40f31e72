// Command-line front end. Talks to the library only through advland.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "advland/advland.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RuntimeFailure {
  std::string message;
};

void check(advland_status status) {
  if (status != ADVLAND_OK) {
    throw RuntimeFailure{std::string(advland_status_string(status)) + ": " + advland_last_error()};
  }
}

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { advland_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

struct NetworkHandle {
  advland_network* ptr = nullptr;
  ~NetworkHandle() { advland_network_free(ptr); }
};

struct SweepHandle {
  advland_sweep_config* ptr = nullptr;
  ~SweepHandle() { advland_sweep_config_free(ptr); }
};

// Writes to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure{"cannot open " + out_path + " for writing"};
  out << text;
  out.flush();
  if (!out) throw RuntimeFailure{"failed writing " + out_path};
}

std::string join(const std::vector<std::uint64_t>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(values[i]);
  }
  return s;
}

advland_activation activation_id(const std::string& name) {
  advland_activation a = ADVLAND_ACTIVATION_RELU;
  check(advland_activation_from_name(name.c_str(), &a));
  return a;
}

std::string outcome_json(const advland_attack_outcome& outcome) {
  OwnedString json;
  check(advland_attack_outcome_json(&outcome, &json.ptr));
  return json.str();
}

struct Common {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> d;
  std::vector<std::uint64_t> k;
  std::vector<std::uint64_t> depth;
  std::string activation = "relu";
  std::uint64_t trials = 0;
  std::string out;
  std::string config;
};

void add_common(CLI::App* cmd, Common& c, bool lists) {
  cmd->add_option("--seed", c.seed, "Root random seed (default 0)");
  const char* suffix = lists ? " (comma-separated list)" : "";
  cmd->add_option("--d", c.d, std::string("Input dimension") + suffix)
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd->add_option("--k", c.k, std::string("Hidden width") + suffix)
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd->add_option("--depth", c.depth, std::string("Number of hidden layers L") + suffix)
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd->add_option("--activation", c.activation, "Activation: relu or tanh (default relu)")
      ->check(CLI::IsMember({"relu", "tanh"}));
  cmd->add_option("--trials", c.trials, "Number of independent trials")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "Output file (default stdout)");
  cmd->add_option("--config", c.config, "Key = value config file; flags override it");
}

std::uint64_t single(const std::vector<std::uint64_t>& v, const char* flag, std::uint64_t fallback,
                     bool required) {
  if (v.empty()) {
    if (required) throw CLI::RequiredError(flag);
    return fallback;
  }
  if (v.size() != 1) throw CLI::ValidationError(flag, "expects a single value here");
  return v.front();
}

// Reads key = value pairs using the sweep config syntax.
std::vector<std::pair<std::string, std::string>> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFailure{"cannot open config file " + path};
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\"");
      const auto e = s.find_last_not_of(" \t\r\"");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return pairs;
}

// attack / landscape read scalar settings from --config when the flag is absent.
void apply_scalar_config(CLI::App* cmd, Common& c) {
  if (c.config.empty()) return;
  for (const auto& [key, value] : read_pairs(c.config)) {
    const auto number = [&](const char* flag) -> std::uint64_t {
      try {
        return std::stoull(value);
      } catch (const std::exception&) {
        throw RuntimeFailure{std::string("config key ") + key + " (for " + flag + "): bad value '" + value + "'"};
      }
    };
    if ((key == "d" || key == "d_values") && cmd->count("--d") == 0) c.d = {number("--d")};
    if ((key == "k" || key == "k_values") && cmd->count("--k") == 0) c.k = {number("--k")};
    if ((key == "depth" || key == "L_values") && cmd->count("--depth") == 0) c.depth = {number("--depth")};
    if (key == "seed" && cmd->count("--seed") == 0) c.seed = number("--seed");
    if (key == "trials" && cmd->count("--trials") == 0) c.trials = number("--trials");
    if (key == "activation" && cmd->count("--activation") == 0) c.activation = value;
  }
}

struct AttackArgs {
  std::string mode = "single";
  double eta = 20.0;
  double eta_max = 20.0;
  std::uint64_t grid = 400;
  double step_size = 0.1;
  std::uint64_t max_steps = 1000;
  std::string network;
};

int run_attack(CLI::App* cmd, Common& c, const AttackArgs& a) {
  apply_scalar_config(cmd, c);
  const bool from_file = !a.network.empty();
  const std::uint64_t trials = c.trials == 0 ? 1 : c.trials;
  std::string text;
  for (std::uint64_t t = 0; t < trials; ++t) {
    NetworkHandle net;
    std::uint64_t d = 0;
    if (from_file) {
      check(advland_network_load(a.network.c_str(), &net.ptr));
      check(advland_network_dims(net.ptr, nullptr, &d, nullptr));
    } else {
      d = single(c.d, "--d", 0, true);
      const std::uint64_t k = single(c.k, "--k", 0, true);
      const auto depth = static_cast<std::uint32_t>(single(c.depth, "--depth", 1, false));
      check(advland_network_sample(depth, d, k, activation_id(c.activation), c.seed + t, &net.ptr));
    }
    std::vector<double> x(d);
    check(advland_sample_input(d, c.seed + t, x.data()));

    advland_attack_outcome outcome{};
    if (a.mode == "single") {
      check(advland_single_step_attack(net.ptr, x.data(), d, a.eta, &outcome));
      text += outcome_json(outcome);
    } else if (a.mode == "smallest") {
      check(advland_smallest_flip_attack(net.ptr, x.data(), d, a.eta_max, a.grid, &outcome));
      text += outcome_json(outcome);
    } else if (a.mode == "universal") {
      check(advland_universal_flip_attack(net.ptr, x.data(), d, a.eta_max, a.grid, &outcome));
      text += outcome_json(outcome);
    } else {
      OwnedString json;
      check(advland_multi_step_attack_json(net.ptr, x.data(), d, a.step_size, a.max_steps, &json.ptr));
      text += json.str();
    }
    text += '\n';
  }
  emit(c.out, text);
  return 0;
}

struct LandscapeArgs {
  std::string quantity;
  double radius = 1.0;
  std::uint64_t iterations = 100;
  std::uint64_t num_dirs = 16;
  std::uint64_t num_radii = 4;
};

int run_landscape(CLI::App* cmd, Common& c, const LandscapeArgs& a) {
  apply_scalar_config(cmd, c);
  if (single(c.depth, "--depth", 1, false) != 1) {
    throw CLI::ValidationError("--depth", "landscape estimates support depth 1 only");
  }
  advland_landscape_request req;
  advland_landscape_request_init(&req);
  check(advland_quantity_from_name(a.quantity.c_str(), &req.quantity));
  req.activation = activation_id(c.activation);
  req.d = single(c.d, "--d", 0, true);
  req.k = single(c.k, "--k", 0, true);
  req.trials = c.trials == 0 ? 1000 : c.trials;
  req.seed = c.seed;
  req.radius = a.radius;
  req.iterations = a.iterations;
  req.num_dirs = a.num_dirs;
  req.num_radii = a.num_radii;
  OwnedString json;
  check(advland_estimate_landscape_json(&req, &json.ptr));
  emit(c.out, json.str() + "\n");
  return 0;
}

struct SweepArgs {
  std::uint64_t nets_per_cell = 0;
  std::uint64_t inputs_per_net = 0;
  double eta_max = 0.0;
  std::uint64_t grid = 0;
};

int run_sweep_cmd(CLI::App* cmd, Common& c, const SweepArgs& a) {
  SweepHandle config;
  if (c.config.empty()) {
    check(advland_sweep_config_new(&config.ptr));
  } else {
    check(advland_sweep_config_load(c.config.c_str(), &config.ptr));
  }
  const auto set = [&](const char* key, const std::string& value) {
    check(advland_sweep_config_set(config.ptr, key, value.c_str()));
  };
  if (cmd->count("--d")) set("d_values", join(c.d));
  if (cmd->count("--k")) set("k_values", join(c.k));
  if (cmd->count("--depth")) set("L_values", join(c.depth));
  if (cmd->count("--activation")) set("activation", c.activation);
  if (cmd->count("--seed")) set("seed", std::to_string(c.seed));
  if (cmd->count("--trials")) {
    set("nets_per_cell", std::to_string(c.trials));
    set("inputs_per_net", "1");
  }
  if (cmd->count("--nets-per-cell")) set("nets_per_cell", std::to_string(a.nets_per_cell));
  if (cmd->count("--inputs-per-net")) set("inputs_per_net", std::to_string(a.inputs_per_net));
  if (cmd->count("--eta-max")) {
    std::ostringstream s;
    s.precision(17);
    s << a.eta_max;
    set("eta_max", s.str());
  }
  if (cmd->count("--grid")) set("grid", std::to_string(a.grid));

  std::string out_path = c.out;
  if (out_path.empty()) {
    char buf[4096];
    check(advland_sweep_config_output_path(config.ptr, buf, sizeof buf));
    out_path = buf;
  }
  OwnedString csv;
  check(advland_run_sweep_csv(config.ptr, &csv.ptr));
  emit(out_path, csv.str());
  return 0;
}

struct BoundsArgs {
  std::vector<std::string> bounds;
  std::vector<double> gammas;
  std::vector<std::uint64_t> sizes;
};

int run_verify(CLI::App* cmd, Common& c, const BoundsArgs& a) {
  apply_scalar_config(cmd, c);
  std::vector<const char*> labels;
  for (const auto& b : a.bounds) labels.push_back(b.c_str());
  std::vector<std::uint64_t> sizes = a.sizes;
  if (sizes.empty()) sizes = c.d;
  OwnedString jsonl;
  int all_pass = 0;
  check(advland_run_bound_suite(labels.data(), labels.size(), a.gammas.data(), a.gammas.size(),
                                sizes.data(), sizes.size(), c.trials == 0 ? 10000 : c.trials,
                                c.seed, &jsonl.ptr, &all_pass));
  emit(c.out, jsonl.str());
  if (!all_pass) std::fprintf(stderr, "advland: at least one bound exceeded its allowance\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial landscape toolkit for random neural networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", advland_version());

  Common attack_common, landscape_common, sweep_common, bounds_common;

  auto* attack = app.add_subcommand("attack", "Run a gradient attack on a sampled network");
  add_common(attack, attack_common, false);
  AttackArgs attack_args;
  attack->add_option("--mode", attack_args.mode,
                     "single: one step with |eta| = --eta; smallest: smallest flipping |eta|; "
                     "universal: input-independent direction; multi: normalized multi-step")
      ->check(CLI::IsMember({"single", "smallest", "universal", "multi"}));
  attack->add_option("--eta", attack_args.eta, "Step magnitude for --mode single (default 20)")
      ->check(CLI::PositiveNumber);
  attack->add_option("--eta-max", attack_args.eta_max, "Search limit for smallest/universal (default 20)")
      ->check(CLI::PositiveNumber);
  attack->add_option("--grid", attack_args.grid, "Grid points before bisection (default 400)")
      ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{100000000}));
  attack->add_option("--step-size", attack_args.step_size, "Step length for --mode multi (default 0.1)")
      ->check(CLI::PositiveNumber);
  attack->add_option("--max-steps", attack_args.max_steps, "Step limit for --mode multi (default 1000)")
      ->check(CLI::PositiveNumber);
  attack->add_option("--network", attack_args.network, "Load the network from a binary dump")
      ->check(CLI::ExistingFile);

  auto* landscape = app.add_subcommand("landscape", "Monte-Carlo estimate of a landscape quantity");
  add_common(landscape, landscape_common, false);
  LandscapeArgs landscape_args;
  landscape
      ->add_option("--quantity", landscape_args.quantity,
                   "value_abs, grad_norm, hessian_opnorm, grad_deviation_sup or flip_fraction")
      ->required()
      ->check(CLI::IsMember(
          {"value_abs", "grad_norm", "hessian_opnorm", "grad_deviation_sup", "flip_fraction"}));
  landscape->add_option("--radius", landscape_args.radius, "Ball radius R (default 1)")
      ->check(CLI::PositiveNumber);
  landscape->add_option("--iterations", landscape_args.iterations, "Power iterations (default 100)")
      ->check(CLI::PositiveNumber);
  landscape->add_option("--num-dirs", landscape_args.num_dirs, "Directions per sup estimate (default 16)")
      ->check(CLI::PositiveNumber);
  landscape->add_option("--num-radii", landscape_args.num_radii, "Radii per direction (default 4)")
      ->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Grid sweep of smallest flipping step sizes, CSV output");
  add_common(sweep, sweep_common, true);
  SweepArgs sweep_args;
  sweep->add_option("--nets-per-cell", sweep_args.nets_per_cell, "Networks per cell (default 100)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--inputs-per-net", sweep_args.inputs_per_net, "Inputs per network (default 100)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--eta-max", sweep_args.eta_max, "Largest |eta| searched (default 20)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--grid", sweep_args.grid, "Grid points before bisection (default 400)")
      ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{100000000}));
  sweep->footer("--trials N runs N independent (network, input) pairs per cell.");

  auto* verify = app.add_subcommand("verify-bounds", "Check concentration bounds by simulation, JSON lines");
  add_common(verify, bounds_common, true);
  BoundsArgs bounds_args;
  verify->add_option("--bounds", bounds_args.bounds,
                     "Bound labels such as value_bound/relu or chisq (default: full suite)")
      ->delimiter(',');
  verify->add_option("--gammas", bounds_args.gammas, "Failure probabilities (default 0.05,0.2)")
      ->delimiter(',');
  verify->add_option("--sizes", bounds_args.sizes, "Problem sizes n with d = k = n (default 1000; --d also works)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    if (app.get_subcommands().empty()) {
      std::cout << app.help("", CLI::AppFormatMode::All);
      return 0;
    }
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "advland: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (attack->parsed()) return run_attack(attack, attack_common, attack_args);
    if (landscape->parsed()) return run_landscape(landscape, landscape_common, landscape_args);
    if (sweep->parsed()) return run_sweep_cmd(sweep, sweep_common, sweep_args);
    return run_verify(verify, bounds_common, bounds_args);
  } catch (const CLI::ParseError& e) {
    std::cerr << "advland: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RuntimeFailure& e) {
    std::cerr << "advland: " << e.message << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "advland: " << e.what() << "\n";
    return kExitRuntime;
  }
}
