#pragma once

// Explicit generalization-bound factors on enumerable instances, their
// verification by simulation, and the auxiliary tail bounds.
//
// Units: typical sets over latents, sensitivities, the G2 factor and the
// information terms multiplied by ln 2 are in bits; C_lambda, G4's log term and
// everything else are in nats, each as in the printed formulas.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ibgb/discrete.hpp"
#include "ibgb/rng.hpp"

namespace ibgb {

struct TypicalSet {
  std::vector<int> members;  // symbols z with P(z) > 0 and -log2 P(z) - H <= eps
  double entropy_bits = 0;
  double epsilon_bits = 0;
  double size_bound = 0;  // 2^(H + eps)
  bool within_bound() const { return static_cast<double>(members.size()) <= size_bound; }
};

/// c * sqrt(m ln(sqrt(n)/gamma) / 2); requires sqrt(n) >= gamma.
double typical_epsilon(double sensitivity, int m, std::size_t n, double gamma);

TypicalSet compute_typical_set(const Eigen::VectorXd& pz, double epsilon_bits);
TypicalSet compute_typical_set(const Eigen::VectorXd& pz, double gamma, std::size_t n, double sensitivity, int m);

/// P(Z_{l,y} = z) for hypothesis h.
Eigen::VectorXd class_latent_pmf(const DiscreteInstance& inst, int h, int layer, int y);

/// Sensitivity c_l^y in bits: max over nuisance states and single-coordinate
/// changes of |log2 p_y(phi(chi(y, xi))) - log2 p_y(phi(chi(y, xi')))|.
/// Requires a nuisance model and a deterministic encoder.
double sensitivity(const DiscreteInstance& inst, int h, int layer, int y);

TypicalSet compute_typical_set(const DiscreteInstance& inst, int h, int layer, int y, double gamma, std::size_t n);

/// e^{-lambda H} sum_q P(q)^{1-lambda}, H in nats; 0 < lambda < 1.
double compute_C_lambda(const Eigen::VectorXd& probs, double lambda);

/// {q : -ln P(q) - H <= eps} with eps = (1/lambda) ln(C_lambda/delta), all in nats.
struct HypothesisTypicalSet {
  std::vector<int> members;
  double probability = 0;
  double epsilon = 0;
  double size_bound = 0;  // e^(H + eps)
};
HypothesisTypicalSet hypothesis_typical_set(const Eigen::VectorXd& probs, double lambda, double delta);

struct BoundParams {
  double gamma = 1.0;
  double lambda = 0.5;
  double delta = 0.05;
  std::size_t n = 100;
  /// |D| used inside the factors; defaults to the size of the layer set.
  std::optional<std::size_t> union_size;
  /// Overrides the computed sensitivity (needed for stochastic encoders).
  std::optional<double> sensitivity;
};

enum class BoundMode { thm1_fixed_encoder, thm2_learned };

struct BoundFactors {
  double G1 = 0;       // G1(0)
  double G1_zeta = 0;  // G1(zeta)
  double G2 = 0, G3 = 0, G4 = 0;
  double C_lambda = 0, zeta = 0;
  double G2_thm1 = 0;  // G2 ln2 + ln(2|Y|/delta)
  double G2_hat = 0, G2_check = 0;
  double gamma = 0, lambda = 0, delta = 0;
  std::size_t n = 0;
  int layer = 0;
  // Instance quantities used by Q_l.
  double i_xz_given_y_bits = 0, i_phi_s_bits = 0, h_phi_given_s_bits = 0;
  double max_train_loss = 0, max_loss = 0;
};

/// Per (instance, n, layer set) caches; thread-compatible after construction.
class BoundEvaluator {
 public:
  BoundEvaluator(const DiscreteInstance& inst, std::vector<int> layers, BoundParams params, BoundMode mode);

  BoundFactors factors(int h, int layer, double max_train_loss) const;
  double q(int h, int layer, double max_train_loss) const;
  /// min over the layer set.
  double bound(int h, double max_train_loss) const;
  const std::vector<int>& layers() const { return layers_; }
  const EncoderLaw& law(int layer) const;

 private:
  struct Cached {
    bool ready = false;
    double G2 = 0, G3 = 0, i_xz_given_y_bits = 0, max_loss = 0;
  };
  const Cached& cached(int h, int layer) const;

  const DiscreteInstance& inst_;
  std::vector<int> layers_;
  BoundParams params_;
  BoundMode mode_;
  std::vector<EncoderLaw> laws_;  // per entry of layers_
  std::vector<double> c_lambda_;
  mutable std::vector<std::vector<Cached>> cache_;  // [layer index][h]
};

BoundFactors bound_factors(const DiscreteInstance& inst, int h, int layer, const BoundParams& params,
                           double max_train_loss, std::size_t union_size = 1);

double theorem_bound(const DiscreteInstance& inst, int h, const std::vector<int>& layers, const BoundParams& params,
                     BoundMode mode, double max_train_loss);

struct VerifyConfig {
  std::size_t n = 100;
  double delta = 0.05;
  int trials = 10000;
  BoundMode mode = BoundMode::thm2_learned;
  /// Empty: {1..D+1} for thm2, {1} for thm1.
  std::vector<int> layers;
  double gamma = 1.0;
  double lambda = 0.5;
  /// Multiplies the bound (1 for the real check).
  double bound_scale = 1.0;
  std::optional<std::size_t> union_size;
};

struct BoundVerdict {
  std::string instance_id;
  BoundMode mode = BoundMode::thm2_learned;
  std::size_t n = 0;
  double delta = 0;
  double bound_value = 0;  // mean bound over trials
  double bound_min = 0;
  double mean_gap = 0;
  double max_gap = 0;
  double violation_rate = 0;
  int trials = 0;
};

BoundVerdict verify_bound(const DiscreteInstance& inst, const VerifyConfig& config, Rng& rng);

/// JSON object {instance_id, mode, n, delta, bound, violation_rate, trials}.
std::string verdict_json(const BoundVerdict& v);

struct Prop1Result {
  double bound = 0;      // as printed, C term linear in C
  double bound_sqrt_c = 0;  // with sqrt(C) in the tail term
  double direct = 0;     // sqrt(2|Y|) sum_k sqrt(v_k)
};
/// Throws PreconditionError naming the first index where v is not sorted
/// descending or exceeds C exp(-(k/beta)^alpha) (k 1-based).
Prop1Result prop1_g3_bound(const std::vector<double>& v, double alpha, double beta, double C, int n_classes);

enum class DecayCase { fast, slow };
struct Prop2Params {
  DecayCase decay = DecayCase::fast;
  double alpha = 2.0;
  double lambda = 0.25;
  std::size_t N = 10000;
  double C = 1.0;  // fast: p_i <= C / i^alpha; slow: c_i <= C
  double c = 1.0;  // slow: c_i >= c
  std::uint64_t seed = 0;  // slow: c_i drawn uniformly in [c, C]
};
struct Prop2Result {
  double c_lambda = 0, entropy = 0;      // direct, nats
  double c_lambda_bound = 0, entropy_bound = 0;  // fast case
  double center = 0, slack = 0;          // slow case, for ln C_lambda
  bool holds = false;
};
/// The power-law distribution the case describes.
Eigen::VectorXd prop2_distribution(const Prop2Params& p);
Prop2Result prop2_clambda_bound(const Prop2Params& p);

struct MultinomialSim {
  Eigen::VectorXd violation_rate;  // per coordinate
  Eigen::VectorXd mean_deviation;  // E[p_k - count_k / n]^+ per coordinate
  double threshold_scale = 0;      // sqrt(2 ln(1/delta) / n)
};
/// Violation for coordinate k: p_k - count_k/n > sqrt(2 p_k ln(1/delta) / n).
MultinomialSim multinomial_concentration_sim(const Eigen::VectorXd& p, std::size_t n, double delta, int trials,
                                             Rng& rng);

/// bound + 2 C_l.
double corollary1_adjust(double bound, double C_l);
/// C_l = eps / sqrt(n).
double binning_constant(double eps, std::size_t n);

/// Fixed instances used by the verification suite and the tests.
struct ReferenceInstance {
  DiscreteInstance instance;
  BoundMode mode = BoundMode::thm2_learned;
  std::vector<int> layers;  // empty: default for the mode
};
std::vector<ReferenceInstance> reference_instances();

/// Balanced two-class instance whose only hypothesis always predicts class 0
/// under 0-1 loss; the gap is exactly 1/2 minus the training error.
DiscreteInstance constant_predictor_instance();

}  // namespace ibgb
