#pragma once

// Fully enumerable worlds: finite X, Y, layered hypotheses and a learning
// rule whose output distribution is computable exactly for every sample size.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ibgb/rng.hpp"

namespace ibgb {

inline constexpr int kMaxInputAlphabet = 64;
inline constexpr int kMaxHypotheses = 4096;

/// Per-class nuisance model: xi = (xi_1..xi_m), coordinates independent with
/// pmf coord_pmf[y].row(i), and x = chi[y][index(xi)] (mixed radix, coordinate
/// 0 least significant).
struct Nuisance {
  int m = 0;
  int levels = 0;
  std::vector<Eigen::MatrixXd> coord_pmf;  // per class: m x levels
  std::vector<std::vector<int>> chi;       // per class: levels^m -> x

  int states() const;
  std::vector<int> digits(int index) const;
  int index(const std::vector<int>& digits) const;
};

/// Layers 2..D are row-stochastic maps Z_{l-1} -> Z_l (layer 1 is the input
/// itself); `decoder` maps Z_D to a predicted class.
struct Hypothesis {
  std::vector<Eigen::MatrixXd> layers;
  std::vector<int> decoder;

  bool operator==(const Hypothesis&) const = default;
};

/// Learning rule: T(s) = sum_i score(y_i, x_i); the hypothesis chosen is
/// bucket_hypothesis[b(T)] with probability 1 - mixing, otherwise uniform.
/// Buckets are equal-mass intervals of the exact distribution of T at n.
struct LearningRule {
  Eigen::MatrixXi score;  // C x |X|, entries in [-max_score, max_score]
  int max_score = 2;
  std::vector<int> bucket_hypothesis;
  double mixing = 0.1;
};

struct DiscreteInstance {
  std::string id;
  Eigen::VectorXd y_prior;
  Eigen::MatrixXd px_given_y;  // C x |X|
  std::optional<Nuisance> nuisance;
  std::vector<Hypothesis> hypotheses;
  LearningRule rule;
  Eigen::MatrixXd loss;  // |Yhat| x C, entries in [0, R]

  int n_classes() const { return static_cast<int>(y_prior.size()); }
  int n_inputs() const { return static_cast<int>(px_given_y.cols()); }
  int n_hypotheses() const { return static_cast<int>(hypotheses.size()); }
  /// Number of encoder layers D; valid layer indices are 1..D+1.
  int depth() const;

  /// P(y, x), C x |X|.
  Eigen::MatrixXd joint_yx() const;
  /// Composed encoder phi_l for hypothesis h: |X| x |Z_l|. l = D+1 is the full model.
  Eigen::MatrixXd encoder(int h, int layer) const;
  /// Remaining map g_l from Z_l to predicted classes: |Z_l| x |Yhat|.
  Eigen::MatrixXd decoder(int h, int layer) const;
  /// Full model f = g_l o phi_l as a |X| x |Yhat| matrix.
  Eigen::MatrixXd model(int h) const { return encoder(h, depth() + 1); }
  bool layer_deterministic(int h, int layer) const;

  /// Expected loss of h at each (y, x): C x |X|.
  Eigen::MatrixXd loss_table(int h) const;
  double expected_loss(int h) const;
  double max_loss() const { return loss.maxCoeff(); }

  /// Validates probability vectors, shapes and the enumeration caps.
  void validate() const;
};

struct DiscreteSpec {
  int n_classes = 2;
  int nuisance_m = 2;
  int nuisance_levels = 2;
  bool shared_inputs = false;
  std::vector<int> hidden_sizes{4};
  int n_hypotheses = 16;
  /// Leading hidden layers shared by every hypothesis.
  int fixed_layers = 0;
  /// Weight of uniform noise mixed into the first hidden layer (0 = deterministic).
  double encoder_noise = 0.0;
  double mixing = 0.1;
  double max_loss = 1.0;
  std::uint64_t seed = 0;
};

/// Inputs per class = nuisance_levels^nuisance_m; |X| multiplies by C unless
/// shared_inputs. Exceeding the caps throws InvalidArgument.
DiscreteInstance gen_discrete_instance(const DiscreteSpec& spec);

/// Exact enumerated information quantities (nats) of Z_l = phi_l(X) under h.
struct LayerInformation {
  double i_xz = 0, i_xz_given_y = 0, i_yz = 0, h_z_given_xy = 0;
};
LayerInformation layer_information(const DiscreteInstance& inst, int h, int layer);

/// P(T = t) for t = -max_score*n .. max_score*n (index t + max_score*n).
Eigen::VectorXd score_distribution(const DiscreteInstance& inst, std::size_t n);

/// Bucket index of each value of T at sample size n.
std::vector<int> score_buckets(const DiscreteInstance& inst, std::size_t n);

/// P(h | T = t) for a bucket.
Eigen::VectorXd rule_distribution(const DiscreteInstance& inst, int bucket);

/// Distribution of the learned hypothesis at layer l over distinct encoders.
struct EncoderLaw {
  std::vector<int> encoder_of;   // hypothesis -> distinct encoder id
  Eigen::VectorXd prob;          // P(phi_l^S = q)
  double entropy = 0;            // H(phi_l^S), nats
  double conditional_entropy = 0;  // H(phi_l^S | S), nats
  double mutual_information() const { return entropy - conditional_entropy; }
};
EncoderLaw encoder_law(const DiscreteInstance& inst, int layer, std::size_t n);

/// One training sample drawn from the instance.
struct DiscreteSample {
  std::vector<int> x;
  std::vector<int> y;
};
DiscreteSample draw_discrete(const DiscreteInstance& inst, std::size_t n, Rng& rng);

}  // namespace ibgb
