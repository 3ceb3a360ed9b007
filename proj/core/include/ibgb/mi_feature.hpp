#pragma once

// Estimators of I(X; Z_l) and I(X; Z_l | Y) for Gaussian-noised features.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ibgb/rng.hpp"

namespace ibgb {

enum class MiEstimator { mc, jensen };

/// Per-input Gaussian q(z | x_i) = N(mu.col(i), diag(sigma.col(i)^2)).
struct LatentBatch {
  Eigen::MatrixXd mu;     // dim x n
  Eigen::MatrixXd sigma;  // dim x n, > 0

  Eigen::Index size() const { return mu.cols(); }
  /// Deterministic features with isotropic kernel noise sigma.
  static LatentBatch kernel(const Eigen::MatrixXd& features, double sigma);
};

struct FeatureMiEstimate {
  double value = 0;  // nats
  MiEstimator estimator = MiEstimator::mc;
  bool conditional = false;
  int k = 0;
  Eigen::Index n = 0;
  int layer = 0;
};

/// The four estimates computed from one shared set of samples.
struct FeatureMiSet {
  double mc = 0, jensen = 0, mc_conditional = 0, jensen_conditional = 0;
};

/// Conditional values need labels; pass an empty label vector to skip them.
/// Every class in [0, n_classes) must be present when labels are given.
FeatureMiSet estimate_feature_mi_all(const LatentBatch& latents, const std::vector<int>& labels, int n_classes,
                                     int k, Rng& rng);

/// Same with explicit standard-normal noise: k matrices of (>= dim) x n.
FeatureMiSet estimate_feature_mi_all(const LatentBatch& latents, const std::vector<int>& labels, int n_classes,
                                     const std::vector<Eigen::MatrixXd>& noise);

FeatureMiEstimate estimate_feature_mi(const LatentBatch& latents, const std::vector<int>& labels, int n_classes,
                                      MiEstimator estimator, bool conditional, int k, Rng& rng, int layer = 0);

enum class SigmaMethod { adaptive, mle };

struct SigmaSchedule {
  std::vector<double> sigma;  // per layer
  SigmaMethod method = SigmaMethod::adaptive;
  std::vector<double> grid;   // candidate variances (mle)
  std::vector<double> mi;     // selected-layer MC estimates (mle)
  std::vector<std::string> warnings;
};

/// sigma_l^2 = base * max |activation| of layer l; sigma_l >= 1e-6.
SigmaSchedule select_sigma_adaptive(const std::vector<Eigen::MatrixXd>& layers, double base = 1e-3);

/// Default candidate variances: 16 log-spaced values in [1e-4, 1].
std::vector<double> default_sigma_grid();

/// From the last layer to the first, maximize the sample mixture
/// log-likelihood over the grid subject to I_hat_l >= I_hat_{l+1}.
SigmaSchedule select_sigma_mle(const std::vector<Eigen::MatrixXd>& layers, const std::vector<double>& grid, int k,
                               Rng& rng);

/// Mean over inputs i and k samples z ~ q(.|x_i) of log (1/n) sum_i' q(z | x_i').
double mixture_log_likelihood(const LatentBatch& latents, int k, Rng& rng);

/// Bin-tuple symbol of each column: per node, n_bins uniform bins over the
/// layer's global [min, max].
std::vector<long long> bin_symbols(const Eigen::MatrixXd& features, int n_bins);

/// Plug-in I(X; T) for binned features T (columns are inputs). `input_ids`
/// identifies repeated inputs (default: all distinct). With labels the result
/// is I(X; T | Y) = sum_c p(c) H(T | Y=c) - H(T | X, Y).
double binned_mi(const Eigen::MatrixXd& features, int n_bins = 10,
                 const std::optional<std::vector<int>>& labels = std::nullopt,
                 const std::optional<std::vector<long long>>& input_ids = std::nullopt);

/// Same, on precomputed symbols.
double plugin_mi(const std::vector<long long>& symbols, const std::optional<std::vector<int>>& labels = std::nullopt,
                 const std::optional<std::vector<long long>>& input_ids = std::nullopt);

}  // namespace ibgb
