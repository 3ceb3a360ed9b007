#include "ibgb/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ibgb/errors.hpp"
#include "ibgb/information.hpp"

namespace ibgb {

namespace {

constexpr double kSumTol = 1e-12;

Eigen::MatrixXd identity(int n) { return Eigen::MatrixXd::Identity(n, n); }

Eigen::MatrixXd one_hot(const std::vector<int>& map, int cols) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(map.size()), cols);
  for (std::size_t i = 0; i < map.size(); ++i) m(static_cast<Eigen::Index>(i), map[i]) = 1.0;
  return m;
}

Eigen::VectorXd dirichlet_ones(int k, Rng& rng) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Eigen::VectorXd v(k);
  for (int i = 0; i < k; ++i) v(i) = g(rng) + 1e-3;
  return v / v.sum();
}

void check_pmf(const Eigen::Ref<const Eigen::VectorXd>& p, const char* what) {
  if ((p.array() < 0).any() || std::abs(p.sum() - 1.0) > kSumTol)
    throw InvalidArgument(std::string(what) + " is not a probability vector");
}

}  // namespace

int Nuisance::states() const {
  int s = 1;
  for (int i = 0; i < m; ++i) s *= levels;
  return s;
}

std::vector<int> Nuisance::digits(int idx) const {
  std::vector<int> d(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    d[static_cast<std::size_t>(i)] = idx % levels;
    idx /= levels;
  }
  return d;
}

int Nuisance::index(const std::vector<int>& d) const {
  int idx = 0;
  for (int i = m - 1; i >= 0; --i) idx = idx * levels + d[static_cast<std::size_t>(i)];
  return idx;
}

int DiscreteInstance::depth() const {
  return hypotheses.empty() ? 1 : 1 + static_cast<int>(hypotheses.front().layers.size());
}

Eigen::MatrixXd DiscreteInstance::joint_yx() const {
  Eigen::MatrixXd j = px_given_y;
  for (int y = 0; y < n_classes(); ++y) j.row(y) *= y_prior(y);
  return j;
}

Eigen::MatrixXd DiscreteInstance::encoder(int h, int layer) const {
  const int d = depth();
  if (h < 0 || h >= n_hypotheses()) throw InvalidArgument("encoder: hypothesis out of range");
  if (layer < 1 || layer > d + 1) throw InvalidArgument("encoder: layer out of range");
  const Hypothesis& hy = hypotheses[static_cast<std::size_t>(h)];
  Eigen::MatrixXd e = identity(n_inputs());
  for (int l = 2; l <= std::min(layer, d); ++l) e = e * hy.layers[static_cast<std::size_t>(l - 2)];
  if (layer == d + 1) e = e * one_hot(hy.decoder, static_cast<int>(loss.rows()));
  return e;
}

Eigen::MatrixXd DiscreteInstance::decoder(int h, int layer) const {
  const int d = depth();
  if (layer < 1 || layer > d + 1) throw InvalidArgument("decoder: layer out of range");
  const Hypothesis& hy = hypotheses[static_cast<std::size_t>(h)];
  const int n_out = static_cast<int>(loss.rows());
  if (layer == d + 1) return identity(n_out);
  Eigen::MatrixXd g = identity(layer == 1 ? n_inputs() : static_cast<int>(hy.layers[static_cast<std::size_t>(layer - 2)].cols()));
  for (int l = layer + 1; l <= d; ++l) g = g * hy.layers[static_cast<std::size_t>(l - 2)];
  return g * one_hot(hy.decoder, n_out);
}

bool DiscreteInstance::layer_deterministic(int h, int layer) const {
  const Eigen::MatrixXd e = encoder(h, layer);
  return ((e.array() == 0.0) || (e.array() == 1.0)).all();
}

Eigen::MatrixXd DiscreteInstance::loss_table(int h) const {
  // f(x, yhat) * loss(yhat, y), summed over yhat.
  return (model(h) * loss).transpose();
}

double DiscreteInstance::expected_loss(int h) const { return (joint_yx().array() * loss_table(h).array()).sum(); }

void DiscreteInstance::validate() const {
  check_pmf(y_prior, "y_prior");
  if (px_given_y.rows() != y_prior.size()) throw InvalidArgument("px_given_y: row count != classes");
  if (n_inputs() > kMaxInputAlphabet) throw InvalidArgument("input alphabet exceeds enumeration cap");
  if (n_hypotheses() < 1 || n_hypotheses() > kMaxHypotheses)
    throw InvalidArgument("hypothesis count outside [1, enumeration cap]");
  for (int y = 0; y < n_classes(); ++y) check_pmf(px_given_y.row(y).transpose(), "px_given_y row");
  if ((loss.array() < 0).any()) throw InvalidArgument("loss table has negative entries");
  if (loss.cols() != n_classes()) throw InvalidArgument("loss table column count != classes");
  const std::size_t d = hypotheses.front().layers.size();
  for (const auto& h : hypotheses) {
    if (h.layers.size() != d) throw InvalidArgument("hypotheses disagree on depth");
    Eigen::Index in = n_inputs();
    for (const auto& m : h.layers) {
      if (m.rows() != in) throw InvalidArgument("layer shape mismatch");
      for (Eigen::Index r = 0; r < m.rows(); ++r) check_pmf(m.row(r).transpose(), "layer row");
      in = m.cols();
    }
    if (static_cast<Eigen::Index>(h.decoder.size()) != in) throw InvalidArgument("decoder size mismatch");
    for (int c : h.decoder)
      if (c < 0 || c >= loss.rows()) throw InvalidArgument("decoder output out of range");
  }
  if (rule.score.rows() != n_classes() || rule.score.cols() != n_inputs())
    throw InvalidArgument("score table shape mismatch");
  if (rule.score.cwiseAbs().maxCoeff() > rule.max_score) throw InvalidArgument("score exceeds max_score");
  if (rule.bucket_hypothesis.empty()) throw InvalidArgument("rule has no buckets");
  for (int h : rule.bucket_hypothesis)
    if (h < 0 || h >= n_hypotheses()) throw InvalidArgument("bucket hypothesis out of range");
  if (rule.mixing < 0 || rule.mixing > 1) throw InvalidArgument("mixing outside [0,1]");
}

DiscreteInstance gen_discrete_instance(const DiscreteSpec& spec) {
  if (spec.n_classes < 2) throw InvalidArgument("gen_discrete_instance: need >= 2 classes");
  if (spec.nuisance_m < 1 || spec.nuisance_levels < 1)
    throw InvalidArgument("gen_discrete_instance: nuisance dimension and levels must be >= 1");
  double per_class = std::pow(static_cast<double>(spec.nuisance_levels), spec.nuisance_m);
  const double n_x = spec.shared_inputs ? per_class : per_class * spec.n_classes;
  if (n_x > kMaxInputAlphabet) throw InvalidArgument("gen_discrete_instance: |X| exceeds 64");
  if (spec.n_hypotheses < 1 || spec.n_hypotheses > kMaxHypotheses)
    throw InvalidArgument("gen_discrete_instance: hypothesis count must be in [1, 4096]");
  if (spec.hidden_sizes.empty()) throw InvalidArgument("gen_discrete_instance: need a hidden layer");
  for (int w : spec.hidden_sizes)
    if (w < 1 || w > kMaxInputAlphabet) throw InvalidArgument("gen_discrete_instance: bad hidden size");
  if (spec.fixed_layers < 0 || spec.fixed_layers > static_cast<int>(spec.hidden_sizes.size()))
    throw InvalidArgument("gen_discrete_instance: fixed_layers out of range");
  if (spec.encoder_noise < 0 || spec.encoder_noise > 1)
    throw InvalidArgument("gen_discrete_instance: encoder_noise outside [0,1]");

  Rng rng = make_rng(spec.seed, {0xD15C});
  const int C = spec.n_classes;
  const int K = static_cast<int>(per_class);
  const int X = static_cast<int>(n_x);

  DiscreteInstance inst;
  inst.id = "discrete-" + std::to_string(spec.seed);
  inst.y_prior = Eigen::VectorXd::Constant(C, 1.0 / C);

  Nuisance nu;
  nu.m = spec.nuisance_m;
  nu.levels = spec.nuisance_levels;
  std::vector<int> perm(static_cast<std::size_t>(K));
  for (int y = 0; y < C; ++y) {
    Eigen::MatrixXd cp(nu.m, nu.levels);
    for (int i = 0; i < nu.m; ++i) cp.row(i) = dirichlet_ones(nu.levels, rng).transpose();
    nu.coord_pmf.push_back(cp);
    std::iota(perm.begin(), perm.end(), 0);
    if (spec.shared_inputs) std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> chi(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) chi[static_cast<std::size_t>(k)] = spec.shared_inputs ? perm[static_cast<std::size_t>(k)] : y * K + k;
    nu.chi.push_back(chi);
  }
  inst.px_given_y = Eigen::MatrixXd::Zero(C, X);
  for (int y = 0; y < C; ++y) {
    for (int k = 0; k < K; ++k) {
      const auto d = nu.digits(k);
      double p = 1.0;
      for (int i = 0; i < nu.m; ++i) p *= nu.coord_pmf[static_cast<std::size_t>(y)](i, d[static_cast<std::size_t>(i)]);
      inst.px_given_y(y, nu.chi[static_cast<std::size_t>(y)][static_cast<std::size_t>(k)]) += p;
    }
    inst.px_given_y.row(y) /= inst.px_given_y.row(y).sum();
  }
  inst.nuisance = nu;

  inst.loss = spec.max_loss * (Eigen::MatrixXd::Ones(C, C) - Eigen::MatrixXd::Identity(C, C));

  auto random_map = [&](int in, int out, bool noisy) {
    std::uniform_int_distribution<int> u(0, out - 1);
    std::vector<int> map(static_cast<std::size_t>(in));
    for (auto& v : map) v = u(rng);
    Eigen::MatrixXd m = one_hot(map, out);
    if (noisy) m = (1.0 - spec.encoder_noise) * m + Eigen::MatrixXd::Constant(in, out, spec.encoder_noise / out);
    return m;
  };

  std::vector<Eigen::MatrixXd> shared;
  {
    int in = X;
    for (int l = 0; l < spec.fixed_layers; ++l) {
      const int out = spec.hidden_sizes[static_cast<std::size_t>(l)];
      shared.push_back(random_map(in, out, l == 0 && spec.encoder_noise > 0));
      in = out;
    }
  }
  const Eigen::MatrixXd pyx = inst.joint_yx();
  std::uniform_int_distribution<int> ucls(0, C - 1);
  std::bernoulli_distribution coin(0.5);
  for (int h = 0; h < spec.n_hypotheses; ++h) {
    Hypothesis hy;
    int in = X;
    for (std::size_t l = 0; l < spec.hidden_sizes.size(); ++l) {
      const int out = spec.hidden_sizes[l];
      if (static_cast<int>(l) < spec.fixed_layers)
        hy.layers.push_back(shared[l]);
      else
        hy.layers.push_back(random_map(in, out, l == 0 && spec.encoder_noise > 0));
      in = out;
    }
    // Decoder: MAP class of each latent value half of the time, else random.
    Eigen::MatrixXd enc = Eigen::MatrixXd::Identity(X, X);
    for (const auto& m : hy.layers) enc = enc * m;
    const Eigen::MatrixXd pyz = pyx * enc;  // C x |Z_D|
    hy.decoder.resize(static_cast<std::size_t>(in));
    const bool map_decoder = coin(rng);
    for (int z = 0; z < in; ++z) {
      Eigen::Index best = 0;
      pyz.col(z).maxCoeff(&best);
      hy.decoder[static_cast<std::size_t>(z)] = map_decoder ? static_cast<int>(best) : ucls(rng);
    }
    inst.hypotheses.push_back(std::move(hy));
  }

  inst.rule.max_score = 2;
  inst.rule.mixing = spec.mixing;
  std::uniform_int_distribution<int> us(-2, 2);
  inst.rule.score.resize(C, X);
  for (int y = 0; y < C; ++y)
    for (int x = 0; x < X; ++x) inst.rule.score(y, x) = us(rng);
  inst.rule.bucket_hypothesis.resize(static_cast<std::size_t>(spec.n_hypotheses));
  std::iota(inst.rule.bucket_hypothesis.begin(), inst.rule.bucket_hypothesis.end(), 0);
  std::shuffle(inst.rule.bucket_hypothesis.begin(), inst.rule.bucket_hypothesis.end(), rng);

  inst.validate();
  return inst;
}

LayerInformation layer_information(const DiscreteInstance& inst, int h, int layer) {
  const Eigen::MatrixXd enc = inst.encoder(h, layer);
  const Eigen::MatrixXd pyx = inst.joint_yx();
  const int C = inst.n_classes();
  const Eigen::Index nz = enc.cols();

  // Slices P(x, z, Y=y).
  std::vector<Eigen::MatrixXd> slices;
  Eigen::MatrixXd pxz = Eigen::MatrixXd::Zero(inst.n_inputs(), nz);
  Eigen::MatrixXd pyz(C, nz);
  for (int y = 0; y < C; ++y) {
    Eigen::MatrixXd s = pyx.row(y).transpose().asDiagonal() * enc;
    pxz += s;
    pyz.row(y) = s.colwise().sum();
    slices.push_back(std::move(s));
  }
  LayerInformation li;
  li.i_xz = mutual_information(pxz);
  li.i_yz = mutual_information(pyz);
  li.i_xz_given_y = conditional_mutual_information(slices);
  double hz = 0.0;
  for (int y = 0; y < C; ++y)
    for (int x = 0; x < inst.n_inputs(); ++x)
      if (pyx(y, x) > 0) hz += pyx(y, x) * entropy(Eigen::VectorXd(enc.row(x).transpose()));
  li.h_z_given_xy = hz;
  return li;
}

Eigen::VectorXd score_distribution(const DiscreteInstance& inst, std::size_t n) {
  const int s = inst.rule.max_score;
  Eigen::VectorXd single = Eigen::VectorXd::Zero(2 * s + 1);
  const Eigen::MatrixXd pyx = inst.joint_yx();
  for (int y = 0; y < inst.n_classes(); ++y)
    for (int x = 0; x < inst.n_inputs(); ++x) single(inst.rule.score(y, x) + s) += pyx(y, x);

  const auto N = static_cast<Eigen::Index>(n);
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(2 * s * N + 1);
  dist(0) = 1.0;
  // After i steps, dist(j) = P(sum of shifted scores = j), j <= 2 s i.
  for (Eigen::Index i = 0; i < N; ++i) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(dist.size());
    const Eigen::Index hi = 2 * s * i;
    for (Eigen::Index j = 0; j <= hi; ++j) {
      if (dist(j) == 0.0) continue;
      for (int v = 0; v <= 2 * s; ++v) next(j + v) += dist(j) * single(v);
    }
    dist.swap(next);
  }
  return dist;
}

std::vector<int> score_buckets(const DiscreteInstance& inst, std::size_t n) {
  const Eigen::VectorXd dist = score_distribution(inst, n);
  const int K = static_cast<int>(inst.rule.bucket_hypothesis.size());
  std::vector<int> b(static_cast<std::size_t>(dist.size()));
  double below = 0.0;
  for (Eigen::Index t = 0; t < dist.size(); ++t) {
    const double mid = below + 0.5 * dist(t);
    b[static_cast<std::size_t>(t)] = std::min(K - 1, static_cast<int>(std::floor(K * mid)));
    below += dist(t);
  }
  return b;
}

Eigen::VectorXd rule_distribution(const DiscreteInstance& inst, int bucket) {
  const int H = inst.n_hypotheses();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(H, inst.rule.mixing / H);
  p(inst.rule.bucket_hypothesis[static_cast<std::size_t>(bucket)]) += 1.0 - inst.rule.mixing;
  return p;
}

EncoderLaw encoder_law(const DiscreteInstance& inst, int layer, std::size_t n) {
  EncoderLaw law;
  std::vector<Eigen::MatrixXd> distinct;
  for (int h = 0; h < inst.n_hypotheses(); ++h) {
    Eigen::MatrixXd e = inst.encoder(h, layer);
    int id = -1;
    for (std::size_t q = 0; q < distinct.size(); ++q)
      if (distinct[q] == e) {
        id = static_cast<int>(q);
        break;
      }
    if (id < 0) {
      id = static_cast<int>(distinct.size());
      distinct.push_back(std::move(e));
    }
    law.encoder_of.push_back(id);
  }
  const auto Q = static_cast<Eigen::Index>(distinct.size());
  auto to_encoders = [&](const Eigen::VectorXd& ph) {
    Eigen::VectorXd pq = Eigen::VectorXd::Zero(Q);
    for (int h = 0; h < inst.n_hypotheses(); ++h) pq(law.encoder_of[static_cast<std::size_t>(h)]) += ph(h);
    return pq;
  };

  const Eigen::VectorXd dist = score_distribution(inst, n);
  const std::vector<int> bucket = score_buckets(inst, n);
  const int K = static_cast<int>(inst.rule.bucket_hypothesis.size());
  Eigen::VectorXd bucket_mass = Eigen::VectorXd::Zero(K);
  for (Eigen::Index t = 0; t < dist.size(); ++t) bucket_mass(bucket[static_cast<std::size_t>(t)]) += dist(t);

  law.prob = Eigen::VectorXd::Zero(Q);
  for (int b = 0; b < K; ++b) {
    if (bucket_mass(b) == 0.0) continue;
    const Eigen::VectorXd pq = to_encoders(rule_distribution(inst, b));
    law.prob += bucket_mass(b) * pq;
    law.conditional_entropy += bucket_mass(b) * entropy(pq);
  }
  law.entropy = entropy(law.prob);
  return law;
}

DiscreteSample draw_discrete(const DiscreteInstance& inst, std::size_t n, Rng& rng) {
  const Eigen::MatrixXd pyx = inst.joint_yx();
  std::vector<double> w(pyx.data(), pyx.data() + pyx.size());
  std::discrete_distribution<int> d(w.begin(), w.end());
  const int C = inst.n_classes();
  DiscreteSample s;
  s.x.resize(n);
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = d(rng);  // column-major: k = x * C + y
    s.y[i] = k % C;
    s.x[i] = k / C;
  }
  return s;
}

}  // namespace ibgb
