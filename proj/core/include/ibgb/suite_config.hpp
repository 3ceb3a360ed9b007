#pragma once

// Experiment grids read from "key = value" text with [section] headers.
// Grid values are comma lists; an architecture is widths joined by 'x'
// (e.g. "32x32x16x16").

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ibgb/mi_feature.hpp"
#include "ibgb/trainer.hpp"

namespace ibgb {

enum class SuiteKind { constrained2d, unconstrained2d, binning2d, bounds_verify };

SuiteKind parse_suite_kind(const std::string& name);
std::string to_string(SuiteKind kind);

struct SuiteConfig {
  SuiteKind kind = SuiteKind::constrained2d;
  std::uint64_t master_seed = 0;
  std::filesystem::path out_dir = "out";
  int jobs = 1;

  // [grid]
  std::vector<std::vector<int>> architectures{{256, 256, 128, 128}, {128, 128, 64, 64}, {64, 64, 32, 32}, {32, 32, 16, 16}};
  std::vector<double> weight_decays{0.0, 0.01, 0.1};
  std::vector<std::uint64_t> dataset_seeds{0, 1, 2};
  std::vector<std::uint64_t> model_seeds{0, 1, 2};
  /// Sample sizes for feature-MI evaluation; 0 means the training set itself.
  std::vector<int> eval_sizes{0, 500};
  /// binning2d only: IB regularization off and on.
  std::vector<bool> ib{false, true};

  // [data]
  int n_train = 50;
  int n_test = 250;
  int n_classes = 5;
  std::uint64_t task_seed = kDefaultTaskSeed;

  // [train]
  TrainConfig train;  // shape and seed are filled per grid cell
  /// binning2d: fixed MI penalty weight when IB is on.
  double ib_penalty = 0.1;

  // [estimators]
  int feature_k = 64;
  int model_k = 8;
  double kde_base = 1e-3;
  /// Noise for deterministic layers; the stochastic latent always uses its own sigma.
  SigmaMethod sigma_method = SigmaMethod::adaptive;
  int n_bins = 10;

  // [bounds]
  std::size_t bound_n = 100;
  double bound_delta = 0.05;
  int bound_trials = 10000;

  /// Number of model rows the grid produces.
  std::size_t model_count() const;
  /// Number of networks actually trained (eval sizes share a network).
  std::size_t trained_count() const;
  void validate() const;
};

/// Paper-scale defaults for a kind.
SuiteConfig default_suite_config(SuiteKind kind);
/// 8-model grid for end-to-end checks.
SuiteConfig smoke_suite_config(SuiteKind kind);

/// Unknown sections or keys and malformed values throw ConfigError with the line number.
SuiteConfig parse_suite_config(std::istream& is, SuiteConfig base);
SuiteConfig load_suite_config(const std::filesystem::path& path);

/// Inverse of parse_suite_config for every key.
void write_suite_config(std::ostream& os, const SuiteConfig& config);

}  // namespace ibgb
