#pragma once

// ReLU trunk -> diagonal Gaussian latent (linear mean and scale heads) ->
// softmax decoder, with hand-written gradients.
//
// Layer indexing for information quantities: l = 1 is the input, l = 2..D-1
// the trunk layers, l = D the latent, l = D+1 the output, D = widths.size()+1.

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "ibgb/dataset.hpp"
#include "ibgb/rng.hpp"

namespace ibgb {

inline constexpr double kSigmaFloor = 1e-4;

struct MlpShape {
  int input_dim = 2;
  std::vector<int> widths{32, 32, 16, 16};  // trunk widths then latent width
  int n_classes = 5;
  /// false: the latent is the mean head alone (z = mu).
  bool stochastic_latent = true;

  int trunk_layers() const { return static_cast<int>(widths.size()) - 1; }
  int latent_dim() const { return widths.back(); }
  int depth() const { return static_cast<int>(widths.size()) + 1; }
  /// Blocks in storage order: trunk..., mean head, scale head, decoder.
  int n_blocks() const { return trunk_layers() + 3; }
  int block_rows(int block) const;
  int block_cols(int block) const;
  std::size_t block_offset(int block) const;
  std::size_t param_count() const;
  /// One past the last coordinate of "parameters up to layer l" (l in 1..D+1).
  std::size_t slice_end(int layer) const;
  /// Blocks belonging to layer l (empty for l = 1).
  std::vector<int> layer_blocks(int layer) const;
  void validate() const;

  bool operator==(const MlpShape&) const = default;
};

/// Weights stored as one flat vector: per block, W (rows x cols, column-major)
/// then b.
struct MlpParams {
  MlpShape shape;
  Eigen::VectorXd flat;

  static MlpParams zeros(const MlpShape& shape);
  /// He-normal trunk, 1/fan_in-variance heads and decoder, zero biases.
  static MlpParams init(const MlpShape& shape, Rng& rng);

  Eigen::Map<const Eigen::MatrixXd> weight(int block) const;
  Eigen::Map<const Eigen::VectorXd> bias(int block) const;
  Eigen::Map<Eigen::MatrixXd> weight(int block);
  Eigen::Map<Eigen::VectorXd> bias(int block);
};

/// Unpacked per-block matrices.
struct MlpLayers {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;
};
MlpLayers unflatten(const MlpShape& shape, const Eigen::VectorXd& flat);
Eigen::VectorXd flatten(const MlpLayers& layers);

/// Flat little-endian doubles at `bin`, shape manifest as JSON at `manifest`.
void write_checkpoint(const MlpParams& p, const std::filesystem::path& bin, const std::filesystem::path& manifest);
MlpParams read_checkpoint(const std::filesystem::path& bin, const std::filesystem::path& manifest);

struct GaussianLatent {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  Eigen::Index dim() const { return mean.size(); }
};

/// Diagonal-Gaussian log density in nats.
double log_density(const GaussianLatent& latent, const Eigen::VectorXd& z);

/// log q(z_s | x_b) for latent means/stds given column-wise (dim x B) and
/// points Z (dim x S); returns B x S.
Eigen::MatrixXd pairwise_log_density(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& sigma,
                                     const Eigen::MatrixXd& z);

/// Deterministic activations for a batch (rows of x are inputs).
struct Activations {
  std::vector<Eigen::MatrixXd> trunk;  // post-ReLU, width x B
  Eigen::MatrixXd mu;                  // latent_dim x B
  Eigen::MatrixXd sigma;               // latent_dim x B (floor when deterministic)
};
Activations forward_features(const MlpParams& p, const Eigen::MatrixXd& x);

struct LatentSamples {
  Eigen::MatrixXd z;  // dim x k
  GaussianLatent latent;
};
LatentSamples sample_latents(const MlpParams& p, const Eigen::VectorXd& x, int k, Rng& rng);

/// Standard-normal noise for k samples of a batch of size B: k matrices dim x B.
std::vector<Eigen::MatrixXd> draw_noise(const MlpShape& shape, Eigen::Index batch, int k, Rng& rng);

/// Class probabilities averaged over k latent samples: B x C.
Eigen::MatrixXd predict_proba(const MlpParams& p, const Eigen::MatrixXd& x, int k, Rng& rng);

struct LossGrad {
  double loss = 0;  // ce + mi_weight * mi
  double ce = 0;
  double mi = 0;  // batch MC estimate of I(X; Z_D), nats
  Eigen::VectorXd grad;
};

/// Objective -mean_i log((1/k) sum_j softmax(g(z_ij))[y_i]) + mi_weight * I_hat
/// with I_hat computed from the same samples over the whole batch.
LossGrad loss_and_grads(const MlpParams& p, const Eigen::MatrixXd& x, const std::vector<int>& y,
                        const std::vector<Eigen::MatrixXd>& noise, double mi_weight);
LossGrad loss_and_grads(const MlpParams& p, const LabeledSample& batch, int k, double mi_weight, Rng& rng);

}  // namespace ibgb
