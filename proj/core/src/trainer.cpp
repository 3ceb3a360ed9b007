#include "ibgb/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "ibgb/errors.hpp"

namespace ibgb {

void TrainConfig::validate() const {
  shape.validate();
  if (!(lr_theta >= 0) || !(lr_lambda >= 0)) throw InvalidArgument("TrainConfig: learning rates must be >= 0");
  if (iterations < 1) throw InvalidArgument("TrainConfig: iterations must be >= 1");
  if (k < 1 || eval_k < 1) throw InvalidArgument("TrainConfig: k must be >= 1");
  if (rho && *rho < 0) throw InvalidArgument("TrainConfig: rho must be >= 0");
  if ((rho || mi_penalty != 0.0) && !shape.stochastic_latent)
    throw InvalidArgument("TrainConfig: MI terms need a stochastic latent");
  if (swag_start_fraction < 0 || swag_start_fraction >= 1)
    throw InvalidArgument("TrainConfig: swag_start_fraction must be in [0,1)");
  if (swag_sample_every < 1) throw InvalidArgument("TrainConfig: swag_sample_every must be >= 1");
}

double dual_update(double lambda, double eta_lambda, double rho, double mi_hat, ConstraintMode mode) {
  if (mode == ConstraintMode::equality) return lambda + eta_lambda * (rho - mi_hat);
  return std::max(0.0, lambda + eta_lambda * (mi_hat - rho));
}

EvalStats evaluate(const MlpParams& p, const LabeledSample& s, int k, Rng& rng) {
  const Eigen::MatrixXd prob = predict_proba(p, s.x, k, rng);
  EvalStats e;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double li = -std::log(std::max(prob(r, s.y[i]), 1e-300));
    e.loss += li;
    e.max_loss = std::max(e.max_loss, li);
    Eigen::Index arg = 0;
    prob.row(r).maxCoeff(&arg);
    if (arg == s.y[i]) ++correct;
  }
  const double n = static_cast<double>(s.size());
  e.loss /= n;
  e.error = 1.0 - static_cast<double>(correct) / n;
  return e;
}

double batch_mi(const MlpParams& p, const LabeledSample& s, int k, Rng& rng) {
  if (!p.shape.stochastic_latent) throw InvalidArgument("batch_mi: deterministic latent");
  const Activations a = forward_features(p, s.x);
  const Eigen::Index B = a.mu.cols();
  const auto noise = draw_noise(p.shape, B, k, rng);
  double mi = 0.0;
  for (const auto& e : noise) {
    const Eigen::MatrixXd z = (a.mu.array() + a.sigma.array() * e.array()).matrix();
    const Eigen::MatrixXd A = pairwise_log_density(a.mu, a.sigma, z);
    for (Eigen::Index i = 0; i < B; ++i) {
      const double mx = A.col(i).maxCoeff();
      const double lse = mx + std::log((A.col(i).array() - mx).exp().sum());
      mi += A(i, i) - lse + std::log(static_cast<double>(B));
    }
  }
  return mi / static_cast<double>(B * k);
}

TrainedModel train(const TrainConfig& config, const LabeledDataset& data) {
  config.validate();
  const LabeledSample tr = data.train();
  const LabeledSample te = data.test();
  Rng init_rng = make_rng(config.seed, {1});
  Rng noise_rng = make_rng(config.seed, {2});
  Rng eval_rng = make_rng(config.seed, {3});

  TrainedModel out;
  out.params = MlpParams::init(config.shape, init_rng);
  MlpParams& p = out.params;
  double lambda = config.rho ? config.lambda0 : 0.0;
  const int swag_start =
      std::min(config.iterations - 2, static_cast<int>(std::floor(config.swag_start_fraction * config.iterations)));
  SwagAccumulator swag;
  Eigen::VectorXd m1, m2;
  if (config.optimizer == Optimizer::adam) {
    m1 = Eigen::VectorXd::Zero(p.flat.size());
    m2 = Eigen::VectorXd::Zero(p.flat.size());
  }

  for (int it = 0; it < config.iterations; ++it) {
    double w = config.mi_penalty;
    if (config.rho) w = config.constraint_mode == ConstraintMode::equality ? -lambda : lambda;
    LossGrad lg;
    try {
      lg = loss_and_grads(p, tr, config.k, w, noise_rng);
    } catch (const NumericError& e) {
      throw TrainingDiverged(std::string("training diverged: ") + e.what(), it);
    }
    if (!std::isfinite(lg.loss)) throw TrainingDiverged("training diverged: non-finite loss", it);
    out.loss_history.push_back(lg.loss);
    out.mi_history.push_back(lg.mi);
    out.lambda_history.push_back(lambda);
    lg.grad += config.weight_decay * p.flat;
    if (config.optimizer == Optimizer::adam) {
      constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
      m1 = b1 * m1 + (1 - b1) * lg.grad;
      m2 = b2 * m2 + (1 - b2) * lg.grad.cwiseAbs2();
      const double c1 = 1 - std::pow(b1, it + 1), c2 = 1 - std::pow(b2, it + 1);
      p.flat.array() -= config.lr_theta * (m1.array() / c1) / ((m2.array() / c2).sqrt() + eps);
    } else {
      p.flat -= config.lr_theta * lg.grad;
    }
    if (!p.flat.allFinite()) throw TrainingDiverged("training diverged: non-finite parameters", it);
    if (config.rho) lambda = dual_update(lambda, config.lr_lambda, *config.rho, lg.mi, config.constraint_mode);
    if (it >= swag_start && (it - swag_start) % config.swag_sample_every == 0) swag.add(p.flat);
  }
  if (swag.count() < 2) swag.add(p.flat);

  std::vector<std::size_t> slices;
  for (int l = 1; l <= config.shape.depth() + 1; ++l) slices.push_back(config.shape.slice_end(l));
  out.swag = swag.finalize(slices);

  out.train = evaluate(p, tr, config.eval_k, eval_rng);
  out.test = evaluate(p, te, config.eval_k, eval_rng);
  out.gap_loss = out.test.loss - out.train.loss;
  out.gap_error = out.test.error - out.train.error;
  out.final_mi = config.shape.stochastic_latent ? batch_mi(p, tr, config.eval_k, eval_rng) : 0.0;
  out.accepted = 1.0 - out.train.error >= config.accept_accuracy;
  return out;
}

}  // namespace ibgb
