#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "advland/activation.hpp"
#include "advland/bounds.hpp"

namespace advland {

struct SweepConfig {
  std::vector<std::size_t> d_values;
  std::vector<std::size_t> k_values;
  std::vector<std::size_t> L_values{1};
  Activation activation{};
  std::size_t nets_per_cell = 100;
  std::size_t inputs_per_net = 100;
  double eta_max = 20.0;
  std::size_t grid = 400;
  std::uint64_t seed = 0;
  std::string output_path;
  /// Largest hidden width accepted.
  std::size_t max_width = 100000;
  /// Per-cell budget on n_total * (grid + 40) * (d k + (L-1) k^2).
  double max_cell_flops = 5e13;

  /// Throws InvalidConfig describing the first violated constraint.
  void validate() const;

  /// Applies one `key = value` assignment using the config-file syntax.
  void set(const std::string& key, const std::string& value);
};

/// Flat TOML-style file: `key = value` lines, `#` comments, lists as
/// `[1, 2, 3]`, strings optionally quoted.
SweepConfig load_sweep_config(const std::filesystem::path& path);
SweepConfig parse_sweep_config(const std::string& text);

struct SweepResult {
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t L = 0;
  std::size_t n_total = 0;
  std::size_t n_flipped = 0;
  std::size_t n_zero_gradient = 0;  // counted in n_total, never flipped
  double fraction_flipped = 0.0;
  // Over flipped cases only; meaningful when n_flipped >= 1.
  double mean_smallest_eta = 0.0;
  double std_smallest_eta = 0.0;
  // Over all cases.
  double mean_grad_norm = 0.0;
  double std_grad_norm = 0.0;
};

/// Runs every (d, k, L) cell in ascending order. Output depends only on the
/// config, not on thread count.
std::vector<SweepResult> run_sweep(const SweepConfig& config);

inline constexpr const char* kSweepCsvHeader =
    "d,k,L,n_total,n_flipped,fraction_flipped,mean_smallest_eta,std_smallest_eta,"
    "mean_grad_norm,std_grad_norm";

std::string format_csv(const std::vector<SweepResult>& results);
/// Throws IoError when the file cannot be written, InvalidArgument when empty.
void emit_csv(const std::vector<SweepResult>& results, const std::filesystem::path& path);
std::vector<SweepResult> parse_csv(const std::string& text);

struct BoundSuiteConfig {
  /// Labels such as "value_bound/relu" or "chisq"; empty selects the default suite.
  std::vector<std::string> bounds;
  std::vector<double> gammas{0.05, 0.2};
  /// Each size n runs at d = k = n ("per_sample_grad_dev/relu" at d = 2n).
  std::vector<std::size_t> sizes{1000};
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
};

const std::vector<std::string>& default_bound_suite();

/// Expands a suite label and size into a concrete BoundSpec (without gamma).
BoundSpec suite_spec(const std::string& label, std::size_t size);

/// Runs every bound x size x gamma. Samples are drawn once per (bound, size)
/// and reused across gammas. Writes JSON lines to `path` when given.
std::vector<BoundReport> run_bound_suite(const BoundSuiteConfig& config,
                                         const std::optional<std::filesystem::path>& path);

}  // namespace advland
