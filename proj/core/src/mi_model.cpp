#include "ibgb/mi_model.hpp"

#include <cmath>
#include <numbers>

#include "ibgb/errors.hpp"

namespace ibgb {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_set(const PosteriorSet& ps, ModelMiVariant variant) {
  if (ps.size() < 2) throw InvalidArgument("MI over datasets undefined for fewer than two datasets");
  const std::size_t G = ps.front().size();
  if (G == 0) throw InvalidArgument("model MI: dataset without posteriors");
  if (variant == ModelMiVariant::jensen && G != 1)
    throw InvalidArgument("model MI: jensen variant takes one posterior per dataset");
  if (variant == ModelMiVariant::rescaled) throw InvalidArgument("model MI: rescaled values come from rescale_model_mi");
  const SwagPosterior* first = ps.front().front();
  for (const auto& row : ps) {
    if (row.size() != G) throw InvalidArgument("model MI: every dataset needs the same seed set");
    for (const auto* p : row) {
      if (!p) throw InvalidArgument("model MI: null posterior");
      if (p->mean.size() != first->mean.size() || p->layer_slices != first->layer_slices)
        throw InvalidArgument("model MI: posteriors disagree on dimension or slices");
    }
  }
}

double log_mean_exp(const Eigen::VectorXd& v) {
  const double mx = v.maxCoeff();
  return mx + std::log((v.array() - mx).exp().sum() / static_cast<double>(v.size()));
}

}  // namespace

double swag_log_density(const SwagPosterior& posterior, const Eigen::VectorXd& w, int layer) {
  const auto e = static_cast<Eigen::Index>(posterior.slice_size(layer));
  if (w.size() != e) throw InvalidArgument("swag_log_density: dimension mismatch");
  const auto var = posterior.var.head(e).array();
  const auto d = w.array() - posterior.mean.head(e).array();
  return -0.5 * ((var * 2.0 * std::numbers::pi).log().sum() + (d.square() / var).sum());
}

std::vector<double> estimate_model_mi_layers(const PosteriorSet& ps, const ModelMiOptions& opt,
                                             const NoiseSource& noise) {
  check_set(ps, opt.variant);
  if (opt.k < 1) throw InvalidArgument("model MI: k must be >= 1");
  const std::size_t D = ps.size(), G = ps.front().size(), P = D * G;
  const SwagPosterior& ref = *ps.front().front();
  const auto& slices = ref.layer_slices;
  const std::size_t L = slices.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(slices.back());

  // Per target: normalizer prefix at each slice end, and 1/var.
  std::vector<Eigen::VectorXd> norm(P);
  std::vector<Eigen::ArrayXd> inv(P);
  for (std::size_t t = 0; t < P; ++t) {
    const SwagPosterior& q = *ps[t / G][t % G];
    inv[t] = q.var.array().inverse();
    norm[t].resize(static_cast<Eigen::Index>(L));
    double acc = 0.0;
    std::size_t i = 0;
    for (std::size_t l = 0; l < L; ++l) {
      for (; i < slices[l]; ++i) acc += -0.5 * (kLog2Pi + std::log(q.var(static_cast<Eigen::Index>(i))));
      norm[t](static_cast<Eigen::Index>(l)) = acc;
    }
  }

  // logp[src][j](t, l) = log p(w_src,j restricted to slice l | posterior t).
  std::vector<double> sum(L, 0.0);
  Eigen::VectorXd own(static_cast<Eigen::Index>(G)), all(static_cast<Eigen::Index>(P));
  Eigen::MatrixXd lp(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(L));
  for (std::size_t src = 0; src < P; ++src) {
    const std::size_t sd = src / G, sg = src % G;
    const SwagPosterior& q = *ps[sd][sg];
    const Eigen::MatrixXd e = noise(sd, sg, dim, opt.k);
    if (e.rows() != dim || e.cols() != opt.k) throw InvalidArgument("model MI: noise shape mismatch");
    const Eigen::ArrayXd sdev = q.var.array().sqrt();
    for (int j = 0; j < opt.k; ++j) {
      const Eigen::ArrayXd w = q.mean.array() + sdev * e.col(j).array();
      for (std::size_t t = 0; t < P; ++t) {
        const SwagPosterior& r = *ps[t / G][t % G];
        const Eigen::ArrayXd quad = (w - r.mean.array()).square() * inv[t];
        double acc = 0.0;
        Eigen::Index i = 0;
        for (std::size_t l = 0; l < L; ++l) {
          const auto end = static_cast<Eigen::Index>(slices[l]);
          if (end > i) acc += quad.segment(i, end - i).sum();
          i = end;
          lp(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(l)) = norm[t](static_cast<Eigen::Index>(l)) - 0.5 * acc;
        }
      }
      for (std::size_t l = 0; l < L; ++l) {
        const auto li = static_cast<Eigen::Index>(l);
        for (std::size_t g = 0; g < G; ++g) own(static_cast<Eigen::Index>(g)) = lp(static_cast<Eigen::Index>(sd * G + g), li);
        all = lp.col(li);
        const double a = opt.log_of_mean ? log_mean_exp(own) : own.mean();
        const double b = opt.log_of_mean ? log_mean_exp(all) : all.mean();
        sum[l] += a - b;
      }
    }
  }
  std::vector<double> out(L);
  for (std::size_t l = 0; l < L; ++l) out[l] = sum[l] / (static_cast<double>(P) * opt.k);
  // slice(l) may be empty; then both terms are identically zero.
  for (std::size_t l = 0; l < L; ++l)
    if (slices[l] == 0) out[l] = 0.0;
  return out;
}

std::vector<double> estimate_model_mi_layers(const PosteriorSet& ps, const ModelMiOptions& opt, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return estimate_model_mi_layers(ps, opt, [&](std::size_t, std::size_t, Eigen::Index dim, int k) {
    Eigen::MatrixXd e(dim, k);
    for (int j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < dim; ++i) e(i, j) = g(rng);
    return e;
  });
}

ModelMiEstimate estimate_model_mi(const PosteriorSet& ps, int layer, const ModelMiOptions& opt, Rng& rng) {
  check_set(ps, opt.variant);
  const int L = ps.front().front()->n_layers();
  if (layer < 1 || layer > L) throw InvalidArgument("estimate_model_mi: layer out of range");
  const auto all = estimate_model_mi_layers(ps, opt, rng);
  ModelMiEstimate e;
  e.value = all[static_cast<std::size_t>(layer - 1)];
  e.variant = opt.variant;
  e.layer = layer;
  e.n_datasets = static_cast<int>(ps.size());
  e.n_seeds = static_cast<int>(ps.front().size());
  return e;
}

std::vector<double> rescale_model_mi(const std::vector<double>& model_mi, const std::vector<double>& feature_mi) {
  if (model_mi.empty() || feature_mi.empty()) throw InvalidArgument("rescale_model_mi: empty input");
  double mu = 0.0, mu2 = 0.0;
  for (double v : model_mi) mu += v;
  for (double v : feature_mi) mu2 += v;
  mu /= static_cast<double>(model_mi.size());
  mu2 /= static_cast<double>(feature_mi.size());
  if (mu == 0.0) throw RescaleUndefined("rescale_model_mi: mean model MI is zero");
  std::vector<double> out;
  out.reserve(model_mi.size());
  for (double v : model_mi) out.push_back(v * (mu2 / mu));
  return out;
}

}  // namespace ibgb
