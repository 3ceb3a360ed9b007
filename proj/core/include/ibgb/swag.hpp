#pragma once

// Diagonal Gaussian over flattened parameters, fitted from optimizer iterates.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace ibgb {

inline constexpr double kSwagVarFloor = 1e-8;

struct SwagPosterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  /// layer_slices[l-1] is one past the last coordinate of slice(l); nondecreasing,
  /// last entry == mean.size().
  std::vector<std::size_t> layer_slices;

  int n_layers() const { return static_cast<int>(layer_slices.size()); }
  std::size_t slice_size(int layer) const;
};

/// Streaming mean and population variance (Welford).
class SwagAccumulator {
 public:
  void add(const Eigen::VectorXd& w);
  std::size_t count() const { return n_; }
  /// Requires >= 2 iterates; variance floored at kSwagVarFloor.
  SwagPosterior finalize(std::vector<std::size_t> layer_slices = {}) const;
  /// Variance before the floor.
  Eigen::VectorXd raw_variance() const;

 private:
  std::size_t n_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
};

SwagPosterior fit_swag(const std::vector<Eigen::VectorXd>& iterates, std::vector<std::size_t> layer_slices = {});

}  // namespace ibgb
