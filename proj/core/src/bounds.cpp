#include "ibgb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"
#include <limits>
#include <random>

#include "ibgb/errors.hpp"
#include "ibgb/information.hpp"

namespace ibgb {

namespace {

constexpr double kTol = 1e-12;

double log2_safe(double p) { return std::log2(p); }

int argmax_row(const Eigen::MatrixXd& m, Eigen::Index row) {
  Eigen::Index j = 0;
  m.row(row).maxCoeff(&j);
  return static_cast<int>(j);
}

}  // namespace

double typical_epsilon(double sensitivity, int m, std::size_t n, double gamma) {
  if (gamma <= 0) throw InvalidArgument("typical_epsilon: gamma must be > 0");
  if (m < 1) throw InvalidArgument("typical_epsilon: m must be >= 1");
  if (sensitivity < 0) throw InvalidArgument("typical_epsilon: negative sensitivity");
  const double r = std::sqrt(static_cast<double>(n)) / gamma;
  if (r < 1.0) throw InvalidArgument("typical_epsilon: requires sqrt(n) >= gamma");
  return sensitivity * std::sqrt(m * std::log(r) / 2.0);
}

TypicalSet compute_typical_set(const Eigen::VectorXd& pz, double epsilon_bits) {
  if (epsilon_bits < 0) throw InvalidArgument("compute_typical_set: negative epsilon");
  TypicalSet t;
  t.entropy_bits = entropy(pz, LogBase::bits);
  t.epsilon_bits = epsilon_bits;
  t.size_bound = std::exp2(t.entropy_bits + epsilon_bits);
  for (Eigen::Index z = 0; z < pz.size(); ++z)
    if (pz(z) > 0 && -log2_safe(pz(z)) - t.entropy_bits <= epsilon_bits + kTol) t.members.push_back(static_cast<int>(z));
  return t;
}

TypicalSet compute_typical_set(const Eigen::VectorXd& pz, double gamma, std::size_t n, double sensitivity, int m) {
  return compute_typical_set(pz, typical_epsilon(sensitivity, m, n, gamma));
}

Eigen::VectorXd class_latent_pmf(const DiscreteInstance& inst, int h, int layer, int y) {
  if (y < 0 || y >= inst.n_classes()) throw InvalidArgument("class_latent_pmf: class out of range");
  return (inst.px_given_y.row(y) * inst.encoder(h, layer)).transpose();
}

double sensitivity(const DiscreteInstance& inst, int h, int layer, int y) {
  if (!inst.nuisance) throw InvalidArgument("sensitivity: instance has no nuisance model");
  if (!inst.layer_deterministic(h, layer)) throw InvalidArgument("sensitivity: encoder is not deterministic");
  const Nuisance& nu = *inst.nuisance;
  const Eigen::MatrixXd enc = inst.encoder(h, layer);
  const Eigen::VectorXd pz = class_latent_pmf(inst, h, layer, y);
  const auto& chi = nu.chi[static_cast<std::size_t>(y)];
  const int S = nu.states();
  std::vector<double> lp(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) lp[static_cast<std::size_t>(s)] = log2_safe(pz(argmax_row(enc, chi[static_cast<std::size_t>(s)])));
  double c = 0.0;
  for (int s = 0; s < S; ++s) {
    std::vector<int> d = nu.digits(s);
    for (int i = 0; i < nu.m; ++i) {
      const int keep = d[static_cast<std::size_t>(i)];
      for (int v = 0; v < nu.levels; ++v) {
        if (v == keep) continue;
        d[static_cast<std::size_t>(i)] = v;
        c = std::max(c, std::abs(lp[static_cast<std::size_t>(s)] - lp[static_cast<std::size_t>(nu.index(d))]));
      }
      d[static_cast<std::size_t>(i)] = keep;
    }
  }
  return c;
}

TypicalSet compute_typical_set(const DiscreteInstance& inst, int h, int layer, int y, double gamma, std::size_t n) {
  const int m = inst.nuisance ? inst.nuisance->m : 1;
  return compute_typical_set(class_latent_pmf(inst, h, layer, y), gamma, n, sensitivity(inst, h, layer, y), m);
}

double compute_C_lambda(const Eigen::VectorXd& probs, double lambda) {
  if (!(lambda > 0 && lambda < 1)) throw InvalidArgument("compute_C_lambda: lambda must lie in (0, 1)");
  if ((probs.array() < 0).any() || std::abs(probs.sum() - 1.0) > 1e-9)
    throw InvalidArgument("compute_C_lambda: not a probability vector");
  const double h = entropy(probs);
  double s = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i)
    if (probs(i) > 0) s += std::pow(probs(i), 1.0 - lambda);
  return std::exp(-lambda * h) * s;
}

HypothesisTypicalSet hypothesis_typical_set(const Eigen::VectorXd& probs, double lambda, double delta) {
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("hypothesis_typical_set: delta must lie in (0, 1)");
  HypothesisTypicalSet t;
  const double h = entropy(probs);
  t.epsilon = std::log(compute_C_lambda(probs, lambda) / delta) / lambda;
  t.size_bound = std::exp(h + t.epsilon);
  for (Eigen::Index i = 0; i < probs.size(); ++i)
    if (probs(i) > 0 && -std::log(probs(i)) - h <= t.epsilon + kTol) {
      t.members.push_back(static_cast<int>(i));
      t.probability += probs(i);
    }
  return t;
}

BoundEvaluator::BoundEvaluator(const DiscreteInstance& inst, std::vector<int> layers, BoundParams params,
                               BoundMode mode)
    : inst_(inst), layers_(std::move(layers)), params_(params), mode_(mode) {
  const int D = inst.depth();
  if (layers_.empty()) throw InvalidArgument("BoundEvaluator: empty layer set");
  if (!(params_.delta > 0 && params_.delta < 1)) throw InvalidArgument("BoundEvaluator: delta must lie in (0, 1)");
  if (!(params_.lambda > 0 && params_.lambda < 1)) throw InvalidArgument("BoundEvaluator: lambda must lie in (0, 1)");
  if (params_.gamma <= 0) throw InvalidArgument("BoundEvaluator: gamma must be > 0");
  if (params_.n == 0) throw InvalidArgument("BoundEvaluator: n must be > 0");
  for (int l : layers_)
    if (l < 1 || l > D + 1) throw InvalidArgument("BoundEvaluator: layer out of range");
  if (mode_ == BoundMode::thm1_fixed_encoder) {
    if (layers_.size() != 1 || layers_.front() > D)
      throw InvalidArgument("BoundEvaluator: the fixed-encoder bound takes one layer in 1..D");
  }
  for (int l : layers_) {
    laws_.push_back(encoder_law(inst, l, params_.n));
    c_lambda_.push_back(compute_C_lambda(laws_.back().prob, params_.lambda));
    if (mode_ == BoundMode::thm1_fixed_encoder && laws_.back().prob.size() != 1)
      throw InvalidArgument("BoundEvaluator: encoder at this layer depends on the sample");
  }
  cache_.assign(layers_.size(), std::vector<Cached>(static_cast<std::size_t>(inst.n_hypotheses())));
}

const EncoderLaw& BoundEvaluator::law(int layer) const {
  for (std::size_t i = 0; i < layers_.size(); ++i)
    if (layers_[i] == layer) return laws_[i];
  throw InvalidArgument("BoundEvaluator: layer not in the set");
}

const BoundEvaluator::Cached& BoundEvaluator::cached(int h, int layer) const {
  if (h < 0 || h >= inst_.n_hypotheses()) throw InvalidArgument("BoundEvaluator: hypothesis out of range");
  std::size_t li = 0;
  while (li < layers_.size() && layers_[li] != layer) ++li;
  if (li == layers_.size()) throw InvalidArgument("BoundEvaluator: layer not in the set");
  Cached& c = cache_[li][static_cast<std::size_t>(h)];
  if (c.ready) return c;

  c.max_loss = inst_.loss_table(h).maxCoeff();
  if (layer <= inst_.depth()) {
    const int C = inst_.n_classes();
    const int m = inst_.nuisance ? inst_.nuisance->m : 1;
    const double scale = typical_epsilon(1.0, m, params_.n, params_.gamma);
    const Eigen::MatrixXd g_loss = inst_.decoder(h, layer) * inst_.loss;  // |Z| x C
    const LayerInformation info = layer_information(inst_, h, layer);
    double mean_c = 0.0;
    for (int y = 0; y < C; ++y) {
      const double cy = params_.sensitivity ? *params_.sensitivity : sensitivity(inst_, h, layer, y);
      mean_c += inst_.y_prior(y) * cy;
      const Eigen::VectorXd pz = class_latent_pmf(inst_, h, layer, y);
      const TypicalSet ts = compute_typical_set(pz, cy * scale);
      double g3 = 0.0;
      for (int a : ts.members) g3 += g_loss(a, y) * std::sqrt(2.0 * C * pz(a));
      c.G3 = std::max(c.G3, g3);
    }
    c.G2 = mean_c * scale + in_base(info.h_z_given_xy, LogBase::bits);
    c.i_xz_given_y_bits = in_base(info.i_xz_given_y, LogBase::bits);
  }
  c.ready = true;
  return c;
}

BoundFactors BoundEvaluator::factors(int h, int layer, double max_train_loss) const {
  const Cached& c = cached(h, layer);
  const EncoderLaw& lw = law(layer);
  std::size_t li = 0;
  while (layers_[li] != layer) ++li;

  BoundFactors f;
  f.layer = layer;
  f.n = params_.n;
  f.gamma = params_.gamma;
  f.lambda = params_.lambda;
  f.delta = params_.delta;
  f.max_train_loss = max_train_loss;
  f.max_loss = c.max_loss;
  f.G2 = c.G2;
  f.G3 = c.G3;
  f.i_xz_given_y_bits = c.i_xz_given_y_bits;
  f.i_phi_s_bits = in_base(lw.mutual_information(), LogBase::bits);
  f.h_phi_given_s_bits = in_base(lw.conditional_entropy, LogBase::bits);
  f.C_lambda = c_lambda_[li];

  const double n = static_cast<double>(params_.n);
  const double Y = inst_.n_classes();
  const double U = static_cast<double>(params_.union_size.value_or(layers_.size()));
  const double delta = params_.delta;
  // As printed: the ln-term is in nats while H(phi|S) and I(phi;S) are in bits.
  f.G4 = std::log(f.C_lambda * U / delta) / params_.lambda + f.h_phi_given_s_bits;
  f.zeta = (f.i_phi_s_bits + f.G4) * kLn2 + std::log(2.0 * U);
  f.G2_thm1 = f.G2 * kLn2 + std::log(2.0 * Y / delta);
  f.G2_hat = (f.G2 + f.G4) * kLn2 + std::log(4.0 * Y * U / delta);
  f.G2_check = f.G4 * kLn2 + std::log(2.0 / delta);
  auto g1 = [&](double q) {
    return max_train_loss * std::sqrt(2.0 * params_.gamma * Y) / std::pow(n, 0.25) * std::sqrt(q + std::log(2.0 * Y / delta)) +
           params_.gamma * c.max_loss;
  };
  f.G1 = g1(0.0);
  f.G1_zeta = g1(f.zeta);
  return f;
}

double BoundEvaluator::q(int h, int layer, double max_train_loss) const {
  const BoundFactors f = factors(h, layer, max_train_loss);
  const double n = static_cast<double>(params_.n);
  if (mode_ == BoundMode::thm1_fixed_encoder)
    return f.G3 * std::sqrt((f.i_xz_given_y_bits * kLn2 + f.G2_thm1) / n) + f.G1 / std::sqrt(n);
  if (layer <= inst_.depth())
    return f.G3 * std::sqrt(((f.i_xz_given_y_bits + f.i_phi_s_bits) * kLn2 + f.G2_hat) / n) + f.G1_zeta / std::sqrt(n);
  return f.max_loss * std::sqrt((f.i_phi_s_bits * kLn2 + f.G2_check) / (2.0 * n));
}

double BoundEvaluator::bound(int h, double max_train_loss) const {
  double b = std::numeric_limits<double>::infinity();
  for (int l : layers_) b = std::min(b, q(h, l, max_train_loss));
  return b;
}

BoundFactors bound_factors(const DiscreteInstance& inst, int h, int layer, const BoundParams& params,
                           double max_train_loss, std::size_t union_size) {
  BoundParams p = params;
  if (!p.union_size) p.union_size = union_size;
  return BoundEvaluator(inst, {layer}, p, BoundMode::thm2_learned).factors(h, layer, max_train_loss);
}

double theorem_bound(const DiscreteInstance& inst, int h, const std::vector<int>& layers, const BoundParams& params,
                     BoundMode mode, double max_train_loss) {
  return BoundEvaluator(inst, layers, params, mode).bound(h, max_train_loss);
}

namespace {

std::vector<int> default_layers(const DiscreteInstance& inst, BoundMode mode) {
  if (mode == BoundMode::thm1_fixed_encoder) return {1};
  std::vector<int> l;
  for (int i = 1; i <= inst.depth() + 1; ++i) l.push_back(i);
  return l;
}

}  // namespace

BoundVerdict verify_bound(const DiscreteInstance& inst, const VerifyConfig& config, Rng& rng) {
  if (config.trials < 1) throw InvalidArgument("verify_bound: trials must be >= 1");
  if (config.bound_scale <= 0) throw InvalidArgument("verify_bound: bound_scale must be > 0");
  inst.validate();
  BoundParams params;
  params.gamma = config.gamma;
  params.lambda = config.lambda;
  params.delta = config.delta;
  params.n = config.n;
  params.union_size = config.union_size;
  const std::vector<int> layers = config.layers.empty() ? default_layers(inst, config.mode) : config.layers;
  const BoundEvaluator ev(inst, layers, params, config.mode);

  const int H = inst.n_hypotheses();
  std::vector<Eigen::MatrixXd> tables;
  std::vector<double> risk;
  for (int h = 0; h < H; ++h) {
    tables.push_back(inst.loss_table(h));
    risk.push_back(inst.expected_loss(h));
  }
  const std::vector<int> bucket = score_buckets(inst, config.n);
  std::vector<std::discrete_distribution<int>> pick;
  for (std::size_t b = 0; b < inst.rule.bucket_hypothesis.size(); ++b) {
    const Eigen::VectorXd p = rule_distribution(inst, static_cast<int>(b));
    pick.emplace_back(p.data(), p.data() + p.size());
  }
  const long long offset = static_cast<long long>(inst.rule.max_score) * static_cast<long long>(config.n);

  BoundVerdict v;
  v.instance_id = inst.id;
  v.mode = config.mode;
  v.n = config.n;
  v.delta = config.delta;
  v.trials = config.trials;
  v.bound_min = std::numeric_limits<double>::infinity();
  v.max_gap = -std::numeric_limits<double>::infinity();
  const std::uint64_t base = rng();
  int violations = 0;
  for (int t = 0; t < config.trials; ++t) {
    Rng r = make_rng(base, {static_cast<std::uint64_t>(t)});
    const DiscreteSample s = draw_discrete(inst, config.n, r);
    long long T = 0;
    for (std::size_t i = 0; i < config.n; ++i) T += inst.rule.score(s.y[i], s.x[i]);
    const int h = pick[static_cast<std::size_t>(bucket[static_cast<std::size_t>(T + offset)])](r);
    const Eigen::MatrixXd& lt = tables[static_cast<std::size_t>(h)];
    double train = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < config.n; ++i) {
      const double l = lt(s.y[i], s.x[i]);
      train += l;
      worst = std::max(worst, l);
    }
    train /= static_cast<double>(config.n);
    const double gap = risk[static_cast<std::size_t>(h)] - train;
    const double b = config.bound_scale * ev.bound(h, worst);
    v.bound_value += b;
    v.bound_min = std::min(v.bound_min, b);
    v.mean_gap += gap;
    v.max_gap = std::max(v.max_gap, gap);
    if (gap > b) ++violations;
  }
  v.bound_value /= config.trials;
  v.mean_gap /= config.trials;
  v.violation_rate = static_cast<double>(violations) / config.trials;
  return v;
}

std::string verdict_json(const BoundVerdict& v) {
  nlohmann::json j;
  j["instance_id"] = v.instance_id;
  j["mode"] = v.mode == BoundMode::thm1_fixed_encoder ? "thm1_fixed_encoder" : "thm2_learned";
  j["n"] = v.n;
  j["delta"] = v.delta;
  j["bound"] = v.bound_value;
  j["violation_rate"] = v.violation_rate;
  j["trials"] = v.trials;
  return j.dump();
}

Prop1Result prop1_g3_bound(const std::vector<double>& v, double alpha, double beta, double C, int n_classes) {
  if (v.empty()) throw InvalidArgument("prop1_g3_bound: empty sequence");
  if (alpha < 1 || beta <= 0 || C <= 0) throw InvalidArgument("prop1_g3_bound: need alpha >= 1, beta > 0, C > 0");
  if (n_classes < 1) throw InvalidArgument("prop1_g3_bound: n_classes must be >= 1");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0) throw PreconditionError("prop1_g3_bound: negative term", i);
    if (i > 0 && v[i] > v[i - 1]) throw PreconditionError("prop1_g3_bound: sequence not sorted descending", i);
    const double k = static_cast<double>(i + 1);
    if (v[i] > C * std::exp(-std::pow(k / beta, alpha)) * (1 + 1e-12))
      throw PreconditionError("prop1_g3_bound: decay envelope violated", i);
  }
  const double scale = std::sqrt(2.0 * n_classes);
  const double bt = std::pow(2.0, 1.0 / alpha) * beta;
  const double head = std::sqrt(v.front()) * std::ceil(bt);
  Prop1Result r;
  r.bound = scale * (head + C * bt / (alpha * std::exp(1.0)));
  r.bound_sqrt_c = scale * (head + std::sqrt(C) * bt / (alpha * std::exp(1.0)));
  double d = 0.0;
  for (double x : v) d += std::sqrt(x);
  r.direct = scale * d;
  return r;
}

Eigen::VectorXd prop2_distribution(const Prop2Params& p) {
  if (p.N < 1) throw InvalidArgument("prop2_distribution: N must be >= 1");
  const auto N = static_cast<Eigen::Index>(p.N);
  Eigen::VectorXd w(N);
  if (p.decay == DecayCase::fast) {
    for (Eigen::Index i = 0; i < N; ++i) w(i) = std::pow(static_cast<double>(i + 1), -p.alpha);
  } else {
    if (!(p.c > 0 && p.c <= p.C)) throw InvalidArgument("prop2_distribution: need 0 < c <= C");
    Rng rng = make_rng(p.seed, {0x5107});
    std::uniform_real_distribution<double> u(p.c, p.C);
    for (Eigen::Index i = 0; i < N; ++i) w(i) = u(rng) * std::pow(static_cast<double>(i + 1), -p.alpha);
  }
  return w / w.sum();
}

Prop2Result prop2_clambda_bound(const Prop2Params& p) {
  const double a = p.alpha, lam = p.lambda;
  if (!(lam > 0 && lam < 1)) throw InvalidArgument("prop2_clambda_bound: lambda must lie in (0, 1)");
  Prop2Result r;
  if (p.decay == DecayCase::fast) {
    if (!(a > 1)) throw InvalidArgument("prop2_clambda_bound: fast decay needs alpha > 1");
    if (p.C < 1) throw InvalidArgument("prop2_clambda_bound: fast decay needs C >= 1");
    if (!(lam < 1 - 1 / a)) throw InvalidArgument("prop2_clambda_bound: need lambda < 1 - 1/alpha");
  } else {
    if (!(a >= 0 && a < 1)) throw InvalidArgument("prop2_clambda_bound: slow decay needs 0 <= alpha < 1");
  }
  const Eigen::VectorXd pr = prop2_distribution(p);
  r.c_lambda = compute_C_lambda(pr, lam);
  r.entropy = entropy(pr);
  if (p.decay == DecayCase::fast) {
    for (Eigen::Index i = 0; i < pr.size(); ++i)
      if (pr(i) > p.C * std::pow(static_cast<double>(i + 1), -a) * (1 + 1e-12))
        throw PreconditionError("prop2_clambda_bound: p_i exceeds C / i^alpha", static_cast<std::size_t>(i));
    const double l3 = std::log(3.0);
    r.entropy_bound =
        1 + p.C * a * (std::log(2.0) / std::pow(2.0, a) + l3 / std::pow(3.0, a) +
                       std::pow(3.0, 1 - a) * ((a - 1) * l3 + 1) / ((a - 1) * (a - 1)));
    const double e = a * (1 - lam);
    r.c_lambda_bound = std::pow(p.C, 1 - lam) * e / (e - 1);
    r.holds = r.c_lambda <= r.c_lambda_bound * (1 + 1e-12) && r.entropy <= r.entropy_bound;
  } else {
    r.center = std::log(1 - (1 - lam) * a) - (1 - 2 * lam) * std::log(1 - a);
    r.slack = (2 - lam) * std::log(p.C / p.c) + p.C / (p.c * (1 - a));
    r.holds = std::abs(std::log(r.c_lambda) - r.center) <= r.slack;
  }
  return r;
}

MultinomialSim multinomial_concentration_sim(const Eigen::VectorXd& p, std::size_t n, double delta, int trials,
                                             Rng& rng) {
  if (n == 0 || trials < 1) throw InvalidArgument("multinomial_concentration_sim: need n > 0 and trials > 0");
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("multinomial_concentration_sim: delta must lie in (0, 1)");
  if ((p.array() < 0).any() || std::abs(p.sum() - 1.0) > 1e-9)
    throw InvalidArgument("multinomial_concentration_sim: not a probability vector");
  const Eigen::Index K = p.size();
  const double nn = static_cast<double>(n);
  const double L = std::log(1.0 / delta);
  MultinomialSim out;
  out.violation_rate = Eigen::VectorXd::Zero(K);
  out.mean_deviation = Eigen::VectorXd::Zero(K);
  out.threshold_scale = std::sqrt(2.0 * L / nn);
  for (int t = 0; t < trials; ++t) {
    long long left = static_cast<long long>(n);
    double mass = 1.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      long long c = 0;
      if (k == K - 1) {
        c = left;
      } else if (left > 0 && p(k) > 0) {
        const double q = std::clamp(p(k) / mass, 0.0, 1.0);
        c = std::binomial_distribution<long long>(left, q)(rng);
      }
      left -= c;
      mass -= p(k);
      const double dev = p(k) - static_cast<double>(c) / nn;
      out.mean_deviation(k) += std::max(0.0, dev);
      if (dev > std::sqrt(2.0 * p(k) * L / nn)) out.violation_rate(k) += 1.0;
    }
  }
  out.violation_rate /= trials;
  out.mean_deviation /= trials;
  return out;
}

double corollary1_adjust(double bound, double C_l) {
  if (C_l < 0) throw InvalidArgument("corollary1_adjust: negative constant");
  return bound + 2.0 * C_l;
}

double binning_constant(double eps, std::size_t n) {
  if (eps < 0 || n == 0) throw InvalidArgument("binning_constant: need eps >= 0 and n > 0");
  return eps / std::sqrt(static_cast<double>(n));
}

std::vector<ReferenceInstance> reference_instances() {
  std::vector<ReferenceInstance> out;

  DiscreteSpec a;
  a.seed = 101;
  DiscreteInstance ia = gen_discrete_instance(a);
  ia.id = "ref-a-fixed";
  out.push_back({ia, BoundMode::thm1_fixed_encoder, {1}});
  ia.id = "ref-a";
  out.push_back({ia, BoundMode::thm2_learned, {}});

  DiscreteSpec b;
  b.shared_inputs = true;
  b.nuisance_m = 3;
  b.fixed_layers = 1;
  b.seed = 102;
  DiscreteInstance ib = gen_discrete_instance(b);
  ib.id = "ref-b-fixed";
  out.push_back({ib, BoundMode::thm1_fixed_encoder, {2}});

  DiscreteSpec c;
  c.n_classes = 3;
  c.nuisance_levels = 3;
  c.hidden_sizes = {6, 4};
  c.n_hypotheses = 64;
  c.seed = 103;
  DiscreteInstance ic = gen_discrete_instance(c);
  ic.id = "ref-c";
  out.push_back({ic, BoundMode::thm2_learned, {}});
  return out;
}

DiscreteInstance constant_predictor_instance() {
  DiscreteInstance inst;
  inst.id = "constant-predictor";
  inst.y_prior = Eigen::Vector2d(0.5, 0.5);
  inst.px_given_y = Eigen::MatrixXd::Identity(2, 2);
  Hypothesis h;
  h.layers.push_back(Eigen::MatrixXd::Ones(2, 1));
  h.decoder = {0};
  inst.hypotheses.push_back(h);
  inst.loss = Eigen::MatrixXd::Ones(2, 2) - Eigen::MatrixXd::Identity(2, 2);
  inst.rule.score = Eigen::MatrixXi::Zero(2, 2);
  inst.rule.bucket_hypothesis = {0};
  inst.rule.mixing = 0.0;
  inst.validate();
  return inst;
}

}  // namespace ibgb
