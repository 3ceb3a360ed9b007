#pragma once

// The 2D clustered classification task.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ibgb/rng.hpp"

namespace ibgb {

/// Inputs (one row per point) with class labels.
struct LabeledSample {
  Eigen::MatrixXd x;
  std::vector<int> y;
  int n_classes = 0;

  std::size_t size() const { return y.size(); }
  /// Per-class index lists.
  std::vector<std::vector<std::size_t>> class_members() const;
};

/// Data generator: isotropic Gaussian clusters, one center per class.
struct ClusterTask {
  Eigen::MatrixXd centers;  // n_classes x 2
  double cluster_std = 0.5;

  int n_classes() const { return static_cast<int>(centers.rows()); }

  /// Centers drawn uniformly in [-half_width, half_width]^2 from `task_seed`.
  static ClusterTask make(std::uint64_t task_seed, int n_classes, double half_width = 4.0,
                          double cluster_std = 0.5);

  /// n points with labels balanced to within one count, in shuffled order.
  LabeledSample draw(std::size_t n, Rng& rng) const;
};

inline constexpr std::uint64_t kDefaultTaskSeed = 2023;

struct LabeledDataset {
  Eigen::MatrixXd inputs;
  std::vector<int> labels;
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  int n_classes = 0;
  std::uint64_t seed = 0;

  LabeledSample train() const { return subset(train_idx); }
  LabeledSample test() const { return subset(test_idx); }
  LabeledSample subset(const std::vector<std::size_t>& idx) const;

  bool operator==(const LabeledDataset&) const = default;
};

/// One dataset draw: n_train + n_test points from the task fixed by
/// `task_seed`; `seed` selects the draw.
LabeledDataset gen_clusters(std::uint64_t seed, std::size_t n_train, std::size_t n_test, int n_classes,
                            std::uint64_t task_seed = kDefaultTaskSeed);

/// CSV with header x0,x1,label,split (split is "train" or "test").
void write_dataset_csv(std::ostream& os, const LabeledDataset& ds);
LabeledDataset read_dataset_csv(std::istream& is, int n_classes);

}  // namespace ibgb
