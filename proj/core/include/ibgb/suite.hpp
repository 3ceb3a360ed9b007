#pragma once

// Grid execution: train every cell, estimate feature and model MI, tabulate
// and correlate. Every random stream is derived from (master_seed, grid
// coordinates), so results do not depend on jobs or completion order.

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ibgb/analysis.hpp"
#include "ibgb/bounds.hpp"
#include "ibgb/suite_config.hpp"

namespace ibgb {

/// Series and scalar names used in metric tables.
namespace metric {
inline constexpr const char* feature_mc = "Ihat(X;Z)";
inline constexpr const char* feature_jensen = "Ibreve(X;Z)";
inline constexpr const char* feature_mc_cond = "Ihat(X;Z|Y)";
inline constexpr const char* feature_jensen_cond = "Ibreve(X;Z|Y)";
inline constexpr const char* model_jensen = "Ibreve(S;theta)";
inline constexpr const char* model_seed_avg = "Ibar(S;theta)";
inline constexpr const char* model_rescaled = "Itilde(S;theta)";
/// Model MI of the full parameter vector (l = D+1), a scalar.
inline constexpr const char* model_jensen_full = "Ibreve(S;theta_full)";
inline constexpr const char* model_seed_avg_full = "Ibar(S;theta_full)";
inline constexpr const char* num_params = "num_params";
inline constexpr const char* m_log_m = "m_log_m";
inline constexpr const char* sum_frobenius = "sum_frobenius";
inline constexpr const char* prod_frobenius = "prod_frobenius";
}  // namespace metric

/// One model row: a trained network evaluated at one eval size (or one IB setting).
struct RunRecord {
  std::string id;
  std::string group;
  std::vector<int> widths;
  double weight_decay = 0;
  std::uint64_t dataset_seed = 0;
  std::uint64_t model_seed = 0;
  int eval_size = 0;
  bool ib = false;
  /// "accepted", "rejected" (train accuracy below the gate) or "diverged".
  std::string status;
  std::string error;
  double train_loss = 0, train_error = 0, test_loss = 0, test_error = 0;
  double gap_loss = 0, gap_error = 0;
  /// MC I(X; Z_D) on the training set at the end of training (nats).
  double final_mi = 0;
  double final_lambda = 0;
  /// Noise std used for each feature layer 1..D (0 for the stochastic latent).
  std::vector<double> sigma;
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, double> scalars;
  /// Accepted and every metric was computable.
  bool complete = false;
};

struct SuiteResult {
  SuiteConfig config;
  std::vector<RunRecord> runs;
  /// Per group, over complete runs.
  std::map<std::string, MetricTable> tables;
  std::vector<CorrelationRow> correlations;
  std::vector<BoundVerdict> verdicts;
};

using SuiteLog = std::function<void(const std::string&)>;

SuiteResult run_suite(const SuiteConfig& config, const SuiteLog& log = {});

/// Layer pairs added as combined metrics for a kind.
std::vector<std::pair<std::string, std::string>> suite_combinations(SuiteKind kind);

/// Groups in output order ("eval=train", "eval=500", "ib=off", ...).
std::vector<std::string> suite_groups(const SuiteConfig& config);

/// Name of the penultimate-layer summary of a series (l = D).
std::string penultimate(const std::string& series, const SuiteConfig& config);

/// Correlation row lookup; nullptr when absent.
const CorrelationRow* find_correlation(const std::vector<CorrelationRow>& rows, const std::string& metric,
                                       const std::string& gap_kind, const std::string& group);

std::string run_json(const RunRecord& run);

/// runs.jsonl, metrics.csv, correlations.csv, scatter.svg and config.ini, or
/// verdicts.jsonl and config.ini for bounds_verify. Throws on I/O failure.
void write_suite_outputs(const SuiteResult& result, const std::filesystem::path& dir);

}  // namespace ibgb
