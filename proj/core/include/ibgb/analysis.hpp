#pragma once

// Correlation of per-model metrics with generalization gaps.

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ibgb/stochastic_mlp.hpp"

namespace ibgb {

enum class CorrelationMethod { pearson, spearman, kendall };

/// Throws UndefinedCorrelation when an argument has zero variance (for
/// kendall: when either side is entirely tied).
double correlate(const std::vector<double>& xs, const std::vector<double>& ys, CorrelationMethod method);
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);
/// Pearson of average ranks.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);
/// Tau-b, O(n log n).
double kendall_tau_b(const std::vector<double>& xs, const std::vector<double>& ys);
/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& xs);

enum class LayerSummary { min, max, mean, fixed };
/// `fixed_layer` is 1-based and used only by LayerSummary::fixed.
double summarize_layers(const std::vector<double>& values, LayerSummary mode, int fixed_layer = 0);

/// Parameter-count and norm baselines. Per-layer norms are Frobenius norms
/// of all parameters (weights and biases) of layers 2..D+1.
struct Baselines {
  double num_params = 0;
  double m_log_m = 0;
  double sum_frobenius = 0;
  double prod_frobenius = 0;
};
Baselines compute_baselines(const MlpParams& params);
std::vector<double> layer_frobenius_norms(const MlpParams& params);

/// Everything measured on one model before tabulation.
struct ModelMetrics {
  std::string id;
  double gap_loss = 0;
  double gap_error = 0;
  std::map<std::string, double> scalars;
  /// Per-layer values, index l-1; every series of a run has the same length.
  std::map<std::string, std::vector<double>> layer_series;
};

/// Metric columns over models; missing entries are NaN.
struct MetricTable {
  std::vector<std::string> model_ids;
  std::vector<double> gap_loss;
  std::vector<double> gap_error;
  std::vector<std::string> metric_names;
  std::vector<std::vector<double>> values;  // [metric][model]

  std::size_t add_model(const std::string& id, double gap_loss, double gap_error);
  void set(const std::string& metric, std::size_t model, double value);
  const std::vector<double>& column(const std::string& metric) const;
  bool has(const std::string& metric) const;

  bool operator==(const MetricTable&) const;
};

/// Name of a layer-summarized series: "name[min]", "name[max]", "name[mean]", "name[l=K]".
std::string summary_name(const std::string& series, LayerSummary mode, int fixed_layer = 0);

/// Scalars as-is; every series and every combination a+b (per layer, then
/// summarized) under min, max, mean and each fixed layer.
MetricTable build_metric_table(const std::vector<ModelMetrics>& runs,
                               const std::vector<std::pair<std::string, std::string>>& combinations);

struct CorrelationRow {
  std::string metric;
  std::string gap_kind;  // "loss" or "error"
  std::optional<double> spearman, pearson, kendall;
  std::size_t n = 0;
  std::string group;
};

/// Correlation of every metric with both gaps over models where the metric is
/// present. Undefined coefficients stay empty.
std::vector<CorrelationRow> correlate_table(const MetricTable& table, const std::string& group = "");

/// Long format: model_id,gap_loss,gap_error,metric,value.
void write_metrics_csv(std::ostream& os, const MetricTable& table);
MetricTable read_metrics_csv(std::istream& is);

/// metric,gap_kind,spearman,pearson,kendall,n,group; undefined as "null".
void write_correlations_csv(std::ostream& os, const std::vector<CorrelationRow>& rows);

/// Least-squares coefficients (c0, c1, c2) of y = c0 + c1 x + c2 x^2.
Eigen::Vector3d polyfit2(const std::vector<double>& xs, const std::vector<double>& ys);

/// Scatter of (x, y) with the degree-2 fit as a dashed curve.
void write_scatter_svg(std::ostream& os, const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::string& title, const std::string& x_label, const std::string& y_label);

}  // namespace ibgb
