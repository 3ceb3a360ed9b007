#include "ibgb/stochastic_mlp.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "ibgb/errors.hpp"
#include "json.hpp"

namespace ibgb {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

double softplus(double r) { return r > 30.0 ? r : std::log1p(std::exp(r)); }
double sigmoid(double r) { return 1.0 / (1.0 + std::exp(-r)); }

void check_finite(const Eigen::MatrixXd& m, int layer) {
  if (!m.allFinite()) throw NumericError("non-finite activation at layer " + std::to_string(layer), layer);
}

// Column-wise log-softmax.
Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& u) {
  Eigen::MatrixXd out(u.rows(), u.cols());
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    const double mx = u.col(c).maxCoeff();
    const double lse = mx + std::log((u.col(c).array() - mx).exp().sum());
    out.col(c) = u.col(c).array() - lse;
  }
  return out;
}

struct Forward {
  std::vector<Eigen::MatrixXd> h;    // h[0] = input, h[t+1] = relu(pre[t])
  std::vector<Eigen::MatrixXd> pre;  // trunk pre-activations
  Eigen::MatrixXd mu, rho, sigma;
};

Forward run_trunk(const MlpParams& p, const Eigen::MatrixXd& x) {
  const MlpShape& s = p.shape;
  if (x.cols() != s.input_dim) throw InvalidArgument("input dimension mismatch");
  const int T = s.trunk_layers();
  Forward f;
  f.h.push_back(x.transpose());
  for (int t = 0; t < T; ++t) {
    Eigen::MatrixXd a = p.weight(t) * f.h.back();
    a.colwise() += p.bias(t);
    check_finite(a, t + 2);
    f.h.push_back(a.cwiseMax(0.0));
    f.pre.push_back(std::move(a));
  }
  f.mu = p.weight(T) * f.h.back();
  f.mu.colwise() += p.bias(T);
  check_finite(f.mu, s.depth());
  if (s.stochastic_latent) {
    f.rho = p.weight(T + 1) * f.h.back();
    f.rho.colwise() += p.bias(T + 1);
    check_finite(f.rho, s.depth());
    f.sigma = f.rho.unaryExpr([](double r) { return softplus(r) + kSigmaFloor; });
  } else {
    f.sigma = Eigen::MatrixXd::Constant(f.mu.rows(), f.mu.cols(), kSigmaFloor);
  }
  return f;
}

}  // namespace

int MlpShape::block_rows(int block) const {
  const int T = trunk_layers();
  if (block < T) return widths[static_cast<std::size_t>(block)];
  if (block <= T + 1) return latent_dim();
  return n_classes;
}

int MlpShape::block_cols(int block) const {
  const int T = trunk_layers();
  if (block < T) return block == 0 ? input_dim : widths[static_cast<std::size_t>(block - 1)];
  if (block <= T + 1) return T == 0 ? input_dim : widths[static_cast<std::size_t>(T - 1)];
  return latent_dim();
}

std::size_t MlpShape::block_offset(int block) const {
  std::size_t off = 0;
  for (int b = 0; b < block; ++b)
    off += static_cast<std::size_t>(block_rows(b)) * static_cast<std::size_t>(block_cols(b) + 1);
  return off;
}

std::size_t MlpShape::param_count() const { return block_offset(n_blocks()); }

std::size_t MlpShape::slice_end(int layer) const {
  const int D = depth();
  if (layer < 1 || layer > D + 1) throw InvalidArgument("slice_end: layer out of range");
  if (layer == 1) return 0;
  if (layer < D) return block_offset(layer - 1);
  if (layer == D) return block_offset(trunk_layers() + 2);
  return param_count();
}

std::vector<int> MlpShape::layer_blocks(int layer) const {
  const int D = depth();
  const int T = trunk_layers();
  if (layer < 1 || layer > D + 1) throw InvalidArgument("layer_blocks: layer out of range");
  if (layer == 1) return {};
  if (layer < D) return {layer - 2};
  if (layer == D) return {T, T + 1};
  return {T + 2};
}

void MlpShape::validate() const {
  if (input_dim < 1 || n_classes < 2 || widths.empty()) throw InvalidArgument("MlpShape: bad dimensions");
  for (int w : widths)
    if (w < 1) throw InvalidArgument("MlpShape: widths must be positive");
}

MlpParams MlpParams::zeros(const MlpShape& shape) {
  shape.validate();
  return MlpParams{shape, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(shape.param_count()))};
}

MlpParams MlpParams::init(const MlpShape& shape, Rng& rng) {
  MlpParams p = zeros(shape);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int b = 0; b < shape.n_blocks(); ++b) {
    const double fan_in = shape.block_cols(b);
    const double sd = b < shape.trunk_layers() ? std::sqrt(2.0 / fan_in) : std::sqrt(1.0 / fan_in);
    auto w = p.weight(b);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = sd * g(rng);
  }
  return p;
}

Eigen::Map<const Eigen::MatrixXd> MlpParams::weight(int block) const {
  return {flat.data() + shape.block_offset(block), shape.block_rows(block), shape.block_cols(block)};
}
Eigen::Map<const Eigen::VectorXd> MlpParams::bias(int block) const {
  const auto r = shape.block_rows(block);
  return {flat.data() + shape.block_offset(block) + static_cast<std::size_t>(r) * static_cast<std::size_t>(shape.block_cols(block)), r};
}
Eigen::Map<Eigen::MatrixXd> MlpParams::weight(int block) {
  return {flat.data() + shape.block_offset(block), shape.block_rows(block), shape.block_cols(block)};
}
Eigen::Map<Eigen::VectorXd> MlpParams::bias(int block) {
  const auto r = shape.block_rows(block);
  return {flat.data() + shape.block_offset(block) + static_cast<std::size_t>(r) * static_cast<std::size_t>(shape.block_cols(block)), r};
}

MlpLayers unflatten(const MlpShape& shape, const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != shape.param_count())
    throw InvalidArgument("unflatten: vector length does not match shape");
  const MlpParams p{shape, flat};
  MlpLayers l;
  for (int b = 0; b < shape.n_blocks(); ++b) {
    l.W.emplace_back(p.weight(b));
    l.b.emplace_back(p.bias(b));
  }
  return l;
}

Eigen::VectorXd flatten(const MlpLayers& layers) {
  Eigen::Index n = 0;
  for (std::size_t i = 0; i < layers.W.size(); ++i) n += layers.W[i].size() + layers.b[i].size();
  Eigen::VectorXd v(n);
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < layers.W.size(); ++i) {
    v.segment(off, layers.W[i].size()) = Eigen::Map<const Eigen::VectorXd>(layers.W[i].data(), layers.W[i].size());
    off += layers.W[i].size();
    v.segment(off, layers.b[i].size()) = layers.b[i];
    off += layers.b[i].size();
  }
  return v;
}

void write_checkpoint(const MlpParams& p, const std::filesystem::path& bin, const std::filesystem::path& manifest) {
  std::ofstream b(bin, std::ios::binary);
  if (!b) throw ConfigError("cannot open " + bin.string());
  b.write(reinterpret_cast<const char*>(p.flat.data()), static_cast<std::streamsize>(p.flat.size() * sizeof(double)));
  nlohmann::json j;
  j["input_dim"] = p.shape.input_dim;
  j["widths"] = p.shape.widths;
  j["n_classes"] = p.shape.n_classes;
  j["stochastic_latent"] = p.shape.stochastic_latent;
  j["param_count"] = p.shape.param_count();
  std::ofstream m(manifest);
  if (!m) throw ConfigError("cannot open " + manifest.string());
  m << j.dump(2) << '\n';
}

MlpParams read_checkpoint(const std::filesystem::path& bin, const std::filesystem::path& manifest) {
  std::ifstream m(manifest);
  if (!m) throw ConfigError("cannot open " + manifest.string());
  const auto j = nlohmann::json::parse(m);
  MlpShape s;
  s.input_dim = j.at("input_dim").get<int>();
  s.widths = j.at("widths").get<std::vector<int>>();
  s.n_classes = j.at("n_classes").get<int>();
  s.stochastic_latent = j.at("stochastic_latent").get<bool>();
  MlpParams p = MlpParams::zeros(s);
  std::ifstream b(bin, std::ios::binary);
  if (!b) throw ConfigError("cannot open " + bin.string());
  b.read(reinterpret_cast<char*>(p.flat.data()), static_cast<std::streamsize>(p.flat.size() * sizeof(double)));
  if (b.gcount() != static_cast<std::streamsize>(p.flat.size() * sizeof(double)))
    throw ConfigError("checkpoint truncated: " + bin.string());
  return p;
}

double log_density(const GaussianLatent& latent, const Eigen::VectorXd& z) {
  if (z.size() != latent.dim() || latent.std.size() != latent.dim())
    throw InvalidArgument("log_density: dimension mismatch");
  const Eigen::ArrayXd u = (z - latent.mean).array() / latent.std.array();
  return -static_cast<double>(latent.dim()) * kHalfLog2Pi - latent.std.array().log().sum() - 0.5 * u.square().sum();
}

Eigen::MatrixXd pairwise_log_density(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& z) {
  if (mu.rows() != z.rows() || sigma.rows() != mu.rows() || sigma.cols() != mu.cols())
    throw InvalidArgument("pairwise_log_density: dimension mismatch");
  // Expanded quadratic form as two GEMMs; coordinates are centered on the
  // mean of mu first to limit cancellation.
  const Eigen::VectorXd c = mu.rowwise().mean();
  const Eigen::MatrixXd m = mu.colwise() - c;
  const Eigen::MatrixXd zc = z.colwise() - c;
  const Eigen::MatrixXd P = sigma.array().square().inverse().matrix();
  const Eigen::MatrixXd mP = (m.array() * P.array()).matrix();
  const Eigen::VectorXd base = -(static_cast<double>(mu.rows()) * kHalfLog2Pi + sigma.array().log().colwise().sum() +
                                 0.5 * (m.array() * mP.array()).colwise().sum())
                                    .transpose()
                                    .matrix();
  Eigen::MatrixXd out = mP.transpose() * zc;
  out.noalias() -= 0.5 * P.transpose() * zc.array().square().matrix();
  out.colwise() += base;
  return out;
}

Activations forward_features(const MlpParams& p, const Eigen::MatrixXd& x) {
  Forward f = run_trunk(p, x);
  Activations a;
  a.trunk.assign(f.h.begin() + 1, f.h.end());
  a.mu = std::move(f.mu);
  a.sigma = std::move(f.sigma);
  return a;
}

LatentSamples sample_latents(const MlpParams& p, const Eigen::VectorXd& x, int k, Rng& rng) {
  if (k < 1) throw InvalidArgument("sample_latents: k must be >= 1");
  const Forward f = run_trunk(p, x.transpose());
  LatentSamples out;
  out.latent.mean = f.mu.col(0);
  out.latent.std = f.sigma.col(0);
  std::normal_distribution<double> g(0.0, 1.0);
  out.z.resize(f.mu.rows(), k);
  for (int j = 0; j < k; ++j)
    for (Eigen::Index d = 0; d < f.mu.rows(); ++d)
      out.z(d, j) = out.latent.mean(d) + out.latent.std(d) * (p.shape.stochastic_latent ? g(rng) : 0.0);
  return out;
}

std::vector<Eigen::MatrixXd> draw_noise(const MlpShape& shape, Eigen::Index batch, int k, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::MatrixXd> noise;
  for (int j = 0; j < k; ++j) {
    Eigen::MatrixXd e(shape.latent_dim(), batch);
    for (Eigen::Index c = 0; c < batch; ++c)
      for (Eigen::Index r = 0; r < e.rows(); ++r) e(r, c) = g(rng);
    noise.push_back(std::move(e));
  }
  return noise;
}

Eigen::MatrixXd predict_proba(const MlpParams& p, const Eigen::MatrixXd& x, int k, Rng& rng) {
  const int T = p.shape.trunk_layers();
  const Forward f = run_trunk(p, x);
  const int kk = p.shape.stochastic_latent ? k : 1;
  const auto noise = draw_noise(p.shape, x.rows(), kk, rng);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p.shape.n_classes, x.rows());
  for (int j = 0; j < kk; ++j) {
    Eigen::MatrixXd z = p.shape.stochastic_latent ? Eigen::MatrixXd(f.mu.array() + f.sigma.array() * noise[static_cast<std::size_t>(j)].array()) : f.mu;
    Eigen::MatrixXd u = p.weight(T + 2) * z;
    u.colwise() += p.bias(T + 2);
    check_finite(u, p.shape.depth() + 1);
    acc += log_softmax(u).array().exp().matrix();
  }
  return (acc / kk).transpose();
}

LossGrad loss_and_grads(const MlpParams& p, const Eigen::MatrixXd& x, const std::vector<int>& y,
                        const std::vector<Eigen::MatrixXd>& noise, double mi_weight) {
  const MlpShape& s = p.shape;
  const Eigen::Index B = x.rows();
  if (B == 0) throw InvalidArgument("loss_and_grads: empty batch");
  if (static_cast<Eigen::Index>(y.size()) != B) throw InvalidArgument("loss_and_grads: label count mismatch");
  if (noise.empty()) throw InvalidArgument("loss_and_grads: k must be >= 1");
  if (!s.stochastic_latent && mi_weight != 0.0)
    throw InvalidArgument("loss_and_grads: MI penalty needs a stochastic latent");
  const int T = s.trunk_layers();
  const int dec = T + 2;
  const int k = s.stochastic_latent ? static_cast<int>(noise.size()) : 1;
  const Eigen::Index m = s.latent_dim();
  const double Bd = static_cast<double>(B);

  const Forward f = run_trunk(p, x);
  std::vector<Eigen::MatrixXd> z(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const auto& e = noise[static_cast<std::size_t>(j)];
    if (e.rows() != m || e.cols() != B) throw InvalidArgument("loss_and_grads: noise shape mismatch");
    z[static_cast<std::size_t>(j)] = s.stochastic_latent ? Eigen::MatrixXd(f.mu.array() + f.sigma.array() * e.array()) : f.mu;
  }

  LossGrad out;
  out.grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.param_count()));
  MlpParams g{s, Eigen::VectorXd()};
  g.flat.swap(out.grad);

  // Cross-entropy of the k-sample predictive average.
  std::vector<Eigen::MatrixXd> logp(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    Eigen::MatrixXd u = p.weight(dec) * z[static_cast<std::size_t>(j)];
    u.colwise() += p.bias(dec);
    check_finite(u, s.depth() + 1);
    logp[static_cast<std::size_t>(j)] = log_softmax(u);
  }
  std::vector<Eigen::MatrixXd> gz(static_cast<std::size_t>(k), Eigen::MatrixXd::Zero(m, B));
  std::vector<Eigen::MatrixXd> gu(static_cast<std::size_t>(k), Eigen::MatrixXd(s.n_classes, B));
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < B; ++i) {
    const int yi = y[static_cast<std::size_t>(i)];
    if (yi < 0 || yi >= s.n_classes) throw InvalidArgument("loss_and_grads: label out of range");
    for (int j = 0; j < k; ++j) v(j) = logp[static_cast<std::size_t>(j)](yi, i);
    const double mx = v.maxCoeff();
    const double lse = mx + std::log((v.array() - mx).exp().sum());
    out.ce -= (lse - std::log(static_cast<double>(k))) / Bd;
    for (int j = 0; j < k; ++j) {
      const double r = std::exp(v(j) - lse) / Bd;
      auto col = gu[static_cast<std::size_t>(j)].col(i);
      col = r * logp[static_cast<std::size_t>(j)].col(i).array().exp().matrix();
      col(yi) -= r;
    }
  }
  for (int j = 0; j < k; ++j) {
    g.weight(dec) += gu[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(j)].transpose();
    g.bias(dec) += gu[static_cast<std::size_t>(j)].rowwise().sum();
    gz[static_cast<std::size_t>(j)] = p.weight(dec).transpose() * gu[static_cast<std::size_t>(j)];
  }

  Eigen::MatrixXd gmu = Eigen::MatrixXd::Zero(m, B);
  Eigen::MatrixXd gsig = Eigen::MatrixXd::Zero(m, B);
  if (s.stochastic_latent) {
    // I_hat = 1/(Bk) sum_{i,j} [a_ii - log mean_i' exp a_ii'], a_ii' = log q(z_ij | x_i').
    // The Gaussian normalizing constant cancels and is omitted. With
    // P = 1/sigma^2 the quadratic form expands into matrix products.
    const Eigen::MatrixXd P = f.sigma.array().inverse().square().matrix();
    const Eigen::MatrixXd muP = (f.mu.array() * P.array()).matrix();
    const Eigen::RowVectorXd base =
        -f.sigma.array().log().colwise().sum() - 0.5 * (f.mu.array() * muP.array()).colwise().sum();
    const double scale = mi_weight / (Bd * k);
    double mi = 0.0;
    Eigen::MatrixXd C(B, B);
    Eigen::RowVectorXd colsum = Eigen::RowVectorXd::Zero(B);
    Eigen::MatrixXd ZC = Eigen::MatrixXd::Zero(m, B), Z2C = Eigen::MatrixXd::Zero(m, B);
    for (int j = 0; j < k; ++j) {
      const auto& zj = z[static_cast<std::size_t>(j)];
      const Eigen::MatrixXd z2 = zj.cwiseAbs2();
      // A(i, i') = a_ii'.
      Eigen::MatrixXd A = zj.transpose() * muP - 0.5 * (z2.transpose() * P);
      A.rowwise() += base;
      for (Eigen::Index i = 0; i < B; ++i) {
        const double mx = A.row(i).maxCoeff();
        auto w = (A.row(i).array() - mx).exp();
        const double sum = w.sum();
        mi += A(i, i) - (mx + std::log(sum)) + std::log(Bd);
        C.row(i) = -w / sum;
        C(i, i) += 1.0;
      }
      if (mi_weight == 0.0) continue;
      C *= scale;
      // d a_ii' / d z_i = -(z_i - mu_i') P_i'.
      gz[static_cast<std::size_t>(j)] -= (zj.array() * (P * C.transpose()).array()).matrix() - muP * C.transpose();
      colsum += C.colwise().sum();
      ZC += zj * C;
      Z2C += z2 * C;
    }
    if (mi_weight != 0.0) {
      // d a_ii' / d mu_i' = (z_i - mu_i') P_i';  d / d sigma_i' = ((z_i - mu_i')^2 P_i' - 1) / sigma_i'.
      const Eigen::ArrayXXd cs = colsum.replicate(m, 1).array();
      gmu.array() += P.array() * ZC.array() - muP.array() * cs;
      const Eigen::ArrayXXd quad = Z2C.array() - 2.0 * f.mu.array() * ZC.array() + f.mu.array().square() * cs;
      gsig.array() += (P.array() * quad - cs) / f.sigma.array();
    }
    out.mi = mi / (Bd * k);
  }

  for (int j = 0; j < k; ++j) {
    gmu += gz[static_cast<std::size_t>(j)];
    if (s.stochastic_latent) gsig.array() += gz[static_cast<std::size_t>(j)].array() * noise[static_cast<std::size_t>(j)].array();
  }
  const Eigen::MatrixXd& hT = f.h.back();
  g.weight(T) += gmu * hT.transpose();
  g.bias(T) += gmu.rowwise().sum();
  Eigen::MatrixXd gh = p.weight(T).transpose() * gmu;
  if (s.stochastic_latent) {
    const Eigen::MatrixXd grho = (gsig.array() * f.rho.unaryExpr([](double r) { return sigmoid(r); }).array()).matrix();
    g.weight(T + 1) += grho * hT.transpose();
    g.bias(T + 1) += grho.rowwise().sum();
    gh += p.weight(T + 1).transpose() * grho;
  }
  for (int t = T - 1; t >= 0; --t) {
    const Eigen::MatrixXd gpre = (gh.array() * (f.pre[static_cast<std::size_t>(t)].array() > 0.0).cast<double>()).matrix();
    g.weight(t) += gpre * f.h[static_cast<std::size_t>(t)].transpose();
    g.bias(t) += gpre.rowwise().sum();
    if (t > 0) gh = p.weight(t).transpose() * gpre;
  }

  out.loss = out.ce + mi_weight * out.mi;
  out.grad.swap(g.flat);
  return out;
}

LossGrad loss_and_grads(const MlpParams& p, const LabeledSample& batch, int k, double mi_weight, Rng& rng) {
  if (k < 1) throw InvalidArgument("loss_and_grads: k must be >= 1");
  const auto noise = draw_noise(p.shape, static_cast<Eigen::Index>(batch.size()), p.shape.stochastic_latent ? k : 1, rng);
  return loss_and_grads(p, batch.x, batch.y, noise, mi_weight);
}

}  // namespace ibgb
