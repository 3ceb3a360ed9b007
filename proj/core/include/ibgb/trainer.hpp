#pragma once

// Full-batch SGD with weight decay and an optional MI constraint enforced by
// a Lagrange multiplier.

#include <cstdint>
#include <optional>
#include <vector>

#include "ibgb/dataset.hpp"
#include "ibgb/stochastic_mlp.hpp"
#include "ibgb/swag.hpp"

namespace ibgb {

enum class ConstraintMode {
  /// I_hat <= rho: objective CE + lambda (I_hat - rho), lambda <- max(0, lambda + eta (I_hat - rho)).
  inequality,
  /// I_hat = rho: objective CE + lambda (rho - I_hat), lambda <- lambda + eta (rho - I_hat).
  equality,
};

/// sgd: theta -= lr g. adam: bias-corrected first/second moments
/// (beta1 0.9, beta2 0.999, eps 1e-8) with the same lr.
enum class Optimizer { sgd, adam };

struct TrainConfig {
  MlpShape shape;
  Optimizer optimizer = Optimizer::sgd;
  double weight_decay = 0.0;
  double lr_theta = 1e-2;
  double lr_lambda = 0.05;
  int iterations = 300;
  int k = 8;
  std::optional<double> rho;
  ConstraintMode constraint_mode = ConstraintMode::inequality;
  /// Fixed MI penalty weight, used when rho is absent.
  double mi_penalty = 0.0;
  double lambda0 = 0.0;
  std::uint64_t seed = 0;
  double swag_start_fraction = 0.5;
  int swag_sample_every = 1;
  int eval_k = 64;
  double accept_accuracy = 0.85;

  void validate() const;
};

struct EvalStats {
  double loss = 0;   // -mean log p(y|x), predictive averaged over eval_k samples
  double error = 0;  // 1 - accuracy
  double max_loss = 0;
};

struct TrainedModel {
  MlpParams params;
  std::vector<double> lambda_history;
  std::vector<double> loss_history;
  std::vector<double> mi_history;
  EvalStats train;
  EvalStats test;
  double gap_loss = 0;
  double gap_error = 0;
  /// MC estimate of I(X; Z_D) on the training set at eval_k samples.
  double final_mi = 0;
  SwagPosterior swag;
  bool accepted = false;
};

double dual_update(double lambda, double eta_lambda, double rho, double mi_hat,
                   ConstraintMode mode = ConstraintMode::inequality);

EvalStats evaluate(const MlpParams& p, const LabeledSample& s, int k, Rng& rng);

/// Batch MC estimate of I(X; Z_D) with k samples per input.
double batch_mi(const MlpParams& p, const LabeledSample& s, int k, Rng& rng);

/// Deterministic given (config.seed, data). Throws TrainingDiverged.
TrainedModel train(const TrainConfig& config, const LabeledDataset& data);

}  // namespace ibgb
