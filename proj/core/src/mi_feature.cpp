#include "ibgb/mi_feature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ibgb/errors.hpp"
#include "ibgb/information.hpp"
#include "ibgb/stochastic_mlp.hpp"

namespace ibgb {

namespace {

struct Accum {
  FeatureMiSet mi;
  double loglik = 0;  // mean log mixture density of the samples
};

std::vector<Eigen::MatrixXd> standard_noise(Eigen::Index dim, Eigen::Index n, int k, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::MatrixXd> out;
  for (int j = 0; j < k; ++j) {
    Eigen::MatrixXd e(dim, n);
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index r = 0; r < dim; ++r) e(r, c) = g(rng);
    out.push_back(std::move(e));
  }
  return out;
}

// log mean exp of a over `idx` (all entries when idx is null) and the
// nonnegative Jensen gap log-mean-exp minus mean.
std::pair<double, double> log_mean_exp_and_gap(const Eigen::VectorXd& a, const std::vector<Eigen::Index>* idx) {
  double mx = -std::numeric_limits<double>::infinity();
  const Eigen::Index cnt = idx ? static_cast<Eigen::Index>(idx->size()) : a.size();
  for (Eigen::Index t = 0; t < cnt; ++t) mx = std::max(mx, a(idx ? (*idx)[static_cast<std::size_t>(t)] : t));
  double s = 0.0, mean = 0.0;
  for (Eigen::Index t = 0; t < cnt; ++t) {
    const double v = a(idx ? (*idx)[static_cast<std::size_t>(t)] : t) - mx;
    s += std::exp(v);
    mean += v;
  }
  const double ln = std::log(static_cast<double>(cnt));
  const double lme_shift = std::log(s) - ln;
  mean /= static_cast<double>(cnt);
  return {mx + lme_shift, std::max(0.0, lme_shift - mean)};
}

Accum estimate_core(const LatentBatch& lat, const std::vector<int>& labels, int n_classes,
                    const std::vector<Eigen::MatrixXd>& noise) {
  const Eigen::Index n = lat.size();
  if (n < 1) throw InvalidArgument("feature MI: empty sample");
  if (lat.sigma.rows() != lat.mu.rows() || lat.sigma.cols() != n)
    throw InvalidArgument("feature MI: mu/sigma shape mismatch");
  if ((lat.sigma.array() <= 0.0).any()) throw InvalidArgument("feature MI: sigma must be positive");
  const bool cond = !labels.empty();
  std::vector<std::vector<Eigen::Index>> members;
  if (cond) {
    if (static_cast<Eigen::Index>(labels.size()) != n) throw InvalidArgument("feature MI: label count mismatch");
    members.resize(static_cast<std::size_t>(n_classes));
    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = labels[static_cast<std::size_t>(i)];
      if (y < 0 || y >= n_classes) throw InvalidArgument("feature MI: label out of range");
      members[static_cast<std::size_t>(y)].push_back(i);
    }
    for (int c = 0; c < n_classes; ++c)
      if (members[static_cast<std::size_t>(c)].empty())
        throw InvalidArgument("feature MI: class " + std::to_string(c) + " has no samples");
  }

  double mc = 0, gap = 0, mcc = 0, gapc = 0, ll = 0;
  for (const auto& e : noise) {
    const Eigen::MatrixXd z = (lat.mu.array() + lat.sigma.array() * e.topRows(lat.mu.rows()).array()).matrix();
    const Eigen::MatrixXd A = pairwise_log_density(lat.mu, lat.sigma, z);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd a = A.col(i);
      const auto [lme, g] = log_mean_exp_and_gap(a, nullptr);
      mc += a(i) - lme;
      gap += g;
      ll += lme;
      if (cond) {
        const auto [lmec, gc] = log_mean_exp_and_gap(a, &members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]);
        mcc += a(i) - lmec;
        gapc += gc;
      }
    }
  }
  const double cnt = static_cast<double>(n) * static_cast<double>(noise.size());
  Accum out;
  out.mi.mc = mc / cnt;
  out.mi.jensen = (mc + gap) / cnt;
  out.mi.mc_conditional = mcc / cnt;
  out.mi.jensen_conditional = (mcc + gapc) / cnt;
  out.loglik = ll / cnt;
  return out;
}

}  // namespace

LatentBatch LatentBatch::kernel(const Eigen::MatrixXd& features, double sigma) {
  if (!(sigma > 0)) throw InvalidArgument("kernel sigma must be positive");
  return LatentBatch{features, Eigen::MatrixXd::Constant(features.rows(), features.cols(), sigma)};
}

FeatureMiSet estimate_feature_mi_all(const LatentBatch& latents, const std::vector<int>& labels, int n_classes,
                                     int k, Rng& rng) {
  if (k < 1) throw InvalidArgument("feature MI: k must be >= 1");
  const auto noise = standard_noise(latents.mu.rows(), latents.size(), k, rng);
  return estimate_core(latents, labels, n_classes, noise).mi;
}

FeatureMiEstimate estimate_feature_mi(const LatentBatch& latents, const std::vector<int>& labels, int n_classes,
                                      MiEstimator estimator, bool conditional, int k, Rng& rng, int layer) {
  if (conditional && labels.empty()) throw InvalidArgument("feature MI: conditional estimate needs labels");
  const FeatureMiSet s = estimate_feature_mi_all(latents, conditional ? labels : std::vector<int>{}, n_classes, k, rng);
  FeatureMiEstimate e;
  e.estimator = estimator;
  e.conditional = conditional;
  e.k = k;
  e.n = latents.size();
  e.layer = layer;
  if (estimator == MiEstimator::mc)
    e.value = conditional ? s.mc_conditional : s.mc;
  else
    e.value = conditional ? s.jensen_conditional : s.jensen;
  return e;
}

FeatureMiSet estimate_feature_mi_all(const LatentBatch& latents, const std::vector<int>& labels, int n_classes,
                                     const std::vector<Eigen::MatrixXd>& noise) {
  if (noise.empty()) throw InvalidArgument("feature MI: k must be >= 1");
  for (const auto& e : noise)
    if (e.rows() < latents.mu.rows() || e.cols() != latents.size())
      throw InvalidArgument("feature MI: noise shape mismatch");
  return estimate_core(latents, labels, n_classes, noise).mi;
}

double mixture_log_likelihood(const LatentBatch& latents, int k, Rng& rng) {
  if (k < 1) throw InvalidArgument("mixture_log_likelihood: k must be >= 1");
  const auto noise = standard_noise(latents.mu.rows(), latents.size(), k, rng);
  return estimate_core(latents, {}, 0, noise).loglik;
}

SigmaSchedule select_sigma_adaptive(const std::vector<Eigen::MatrixXd>& layers, double base) {
  if (!(base > 0)) throw InvalidArgument("select_sigma_adaptive: base must be positive");
  SigmaSchedule s;
  s.method = SigmaMethod::adaptive;
  for (const auto& f : layers) {
    const double mx = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    s.sigma.push_back(std::max(1e-6, std::sqrt(base * mx)));
  }
  return s;
}

std::vector<double> default_sigma_grid() {
  std::vector<double> g;
  for (int i = 0; i < 16; ++i) g.push_back(std::pow(10.0, -4.0 + 4.0 * i / 15.0));
  return g;
}

SigmaSchedule select_sigma_mle(const std::vector<Eigen::MatrixXd>& layers, const std::vector<double>& grid, int k,
                               Rng& rng) {
  if (grid.empty()) throw InvalidArgument("select_sigma_mle: empty grid");
  for (double v : grid)
    if (!(v > 0)) throw InvalidArgument("select_sigma_mle: grid values must be positive");
  if (layers.empty()) throw InvalidArgument("select_sigma_mle: no layers");
  if (k < 1) throw InvalidArgument("select_sigma_mle: k must be >= 1");
  Eigen::Index dim = 0;
  const Eigen::Index n = layers.front().cols();
  for (const auto& f : layers) {
    if (f.cols() != n) throw InvalidArgument("select_sigma_mle: layers disagree on sample count");
    dim = std::max(dim, f.rows());
  }
  // Common random numbers across layers and candidates.
  const auto noise = standard_noise(dim, n, k, rng);

  SigmaSchedule s;
  s.method = SigmaMethod::mle;
  s.grid = grid;
  const std::size_t L = layers.size();
  s.sigma.assign(L, 0.0);
  s.mi.assign(L, 0.0);
  for (std::size_t li = L; li-- > 0;) {
    double best_ll = -std::numeric_limits<double>::infinity(), best_sigma = 0, best_mi = 0;
    double fallback_mi = -std::numeric_limits<double>::infinity(), fallback_sigma = 0;
    bool feasible = false;
    for (double v : grid) {
      const double sd = std::sqrt(v);
      const Accum a = estimate_core(LatentBatch::kernel(layers[li], sd), {}, 0, noise);
      if (a.mi.mc > fallback_mi) {
        fallback_mi = a.mi.mc;
        fallback_sigma = sd;
      }
      const bool ok = li + 1 == L || a.mi.mc >= s.mi[li + 1];
      if (ok && a.loglik > best_ll) {
        feasible = true;
        best_ll = a.loglik;
        best_sigma = sd;
        best_mi = a.mi.mc;
      }
    }
    if (!feasible) {
      best_sigma = fallback_sigma;
      best_mi = fallback_mi;
      s.warnings.push_back("layer " + std::to_string(li + 1) + ": monotonicity constraint unsatisfiable on grid");
    }
    s.sigma[li] = best_sigma;
    s.mi[li] = best_mi;
  }
  return s;
}

std::vector<long long> bin_symbols(const Eigen::MatrixXd& features, int n_bins) {
  if (n_bins < 2) throw InvalidArgument("binning: n_bins must be >= 2");
  const double lo = features.size() ? features.minCoeff() : 0.0;
  const double hi = features.size() ? features.maxCoeff() : 0.0;
  const double width = hi - lo;
  std::map<std::vector<int>, long long> ids;
  std::vector<long long> out;
  out.reserve(static_cast<std::size_t>(features.cols()));
  std::vector<int> tuple(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
      int b = 0;
      if (width > 0) b = std::min(n_bins - 1, static_cast<int>(std::floor((features(r, c) - lo) / width * n_bins)));
      tuple[static_cast<std::size_t>(r)] = b;
    }
    const auto [it, inserted] = ids.emplace(tuple, static_cast<long long>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

namespace {

// Plug-in H(T | G) for group keys G.
double conditional_plugin_entropy(const std::vector<long long>& t, const std::vector<long long>& g) {
  std::map<long long, std::vector<long long>> groups;
  for (std::size_t i = 0; i < t.size(); ++i) groups[g[i]].push_back(t[i]);
  double h = 0.0;
  for (const auto& [key, members] : groups)
    h += static_cast<double>(members.size()) / static_cast<double>(t.size()) * empirical_entropy(members);
  return h;
}

}  // namespace

double plugin_mi(const std::vector<long long>& symbols, const std::optional<std::vector<int>>& labels,
                 const std::optional<std::vector<long long>>& input_ids) {
  const std::size_t n = symbols.size();
  if (n == 0) throw InvalidArgument("plugin_mi: empty sample");
  if (labels && labels->size() != n) throw InvalidArgument("plugin_mi: label count mismatch");
  if (input_ids && input_ids->size() != n) throw InvalidArgument("plugin_mi: input id count mismatch");
  std::vector<long long> xkey(n);
  for (std::size_t i = 0; i < n; ++i) xkey[i] = input_ids ? (*input_ids)[i] : static_cast<long long>(i);
  if (!labels) return empirical_entropy(symbols) - conditional_plugin_entropy(symbols, xkey);
  std::vector<long long> ykey(labels->begin(), labels->end());
  for (long long y : ykey)
    if (y < 0 || y >= 1024) throw InvalidArgument("plugin_mi: labels must be in [0, 1024)");
  // Key for (x, y): labels are small, so pack them into the low bits.
  std::vector<long long> xykey(n);
  for (std::size_t i = 0; i < n; ++i) xykey[i] = xkey[i] * 1024 + ykey[i];
  return conditional_plugin_entropy(symbols, ykey) - conditional_plugin_entropy(symbols, xykey);
}

double binned_mi(const Eigen::MatrixXd& features, int n_bins, const std::optional<std::vector<int>>& labels,
                 const std::optional<std::vector<long long>>& input_ids) {
  return plugin_mi(bin_symbols(features, n_bins), labels, input_ids);
}

}  // namespace ibgb
