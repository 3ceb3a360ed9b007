#pragma once

// Estimators of I(S; theta_l) from per-dataset SWAG posteriors.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ibgb/rng.hpp"
#include "ibgb/swag.hpp"

namespace ibgb {

enum class ModelMiVariant { jensen, seed_averaged, rescaled };

struct ModelMiEstimate {
  double value = 0;  // nats
  ModelMiVariant variant = ModelMiVariant::jensen;
  int layer = 0;
  int n_datasets = 0;
  int n_seeds = 0;
};

/// posteriors[d][g]: dataset d, seed g. The jensen variant takes one seed per
/// dataset; seed_averaged requires the same seed count for every dataset.
using PosteriorSet = std::vector<std::vector<const SwagPosterior*>>;

struct ModelMiOptions {
  int k = 8;
  ModelMiVariant variant = ModelMiVariant::jensen;
  /// Replace means of log-densities by logs of mean densities.
  bool log_of_mean = false;
};

/// Diagonal-Gaussian log density of w over slice(layer) coordinates.
double swag_log_density(const SwagPosterior& posterior, const Eigen::VectorXd& w, int layer);

/// Standard-normal noise for posterior (d, g): dim x k.
using NoiseSource = std::function<Eigen::MatrixXd(std::size_t d, std::size_t g, Eigen::Index dim, int k)>;

/// Estimates for every layer 1..L at once (index l-1), sharing samples.
std::vector<double> estimate_model_mi_layers(const PosteriorSet& posteriors, const ModelMiOptions& opt, Rng& rng);
std::vector<double> estimate_model_mi_layers(const PosteriorSet& posteriors, const ModelMiOptions& opt,
                                             const NoiseSource& noise);

ModelMiEstimate estimate_model_mi(const PosteriorSet& posteriors, int layer, const ModelMiOptions& opt, Rng& rng);

/// Each value times mean(feature_mi) / mean(model_mi).
std::vector<double> rescale_model_mi(const std::vector<double>& model_mi, const std::vector<double>& feature_mi);

}  // namespace ibgb
