#pragma once

// Independent reference implementations used as oracles. Each one follows the
// textbook definition directly and shares no code with the library.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

namespace ibgb::reference {

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Rank = 1 + #smaller + (#equal - 1) / 2, by counting.
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : x) {
      less += v < x[i];
      equal += v == x[i];
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

/// Tau-b over all pairs.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double conc = 0, disc = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double a = x[i] - x[j], b = y[i] - y[j];
      if (a == 0 && b == 0) continue;
      if (a == 0) {
        ++tx;
      } else if (b == 0) {
        ++ty;
      } else if ((a > 0) == (b > 0)) {
        ++conc;
      } else {
        ++disc;
      }
    }
  return (conc - disc) / std::sqrt((conc + disc + tx) * (conc + disc + ty));
}

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double normal_pdf(double z, double mu, double sigma) {
  const double t = (z - mu) / sigma;
  return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2 * std::numbers::pi));
}

/// I(class; Z) for Z | c ~ N(means[c], sigma^2) with equal class weights.
inline double mixture_mi_quadrature(const std::vector<double>& means, double sigma) {
  const double w = 1.0 / static_cast<double>(means.size());
  auto mix = [&](double z) {
    double p = 0;
    for (double m : means) p += w * normal_pdf(z, m, sigma);
    return p;
  };
  const double lo = *std::min_element(means.begin(), means.end()) - 12 * sigma;
  const double hi = *std::max_element(means.begin(), means.end()) + 12 * sigma;
  const double h_mix = simpson(
      [&](double z) {
        const double p = mix(z);
        return p > 0 ? -p * std::log(p) : 0.0;
      },
      lo, hi, 20000);
  const double h_cond = 0.5 * std::log(2 * std::numbers::pi * std::numbers::e * sigma * sigma);
  return h_mix - h_cond;
}

/// Plug-in entropy (nats) of arbitrary keys.
template <class Key>
double plugin_entropy(const std::vector<Key>& keys) {
  std::map<Key, double> counts;
  for (const auto& k : keys) counts[k] += 1;
  double h = 0;
  const double n = static_cast<double>(keys.size());
  for (const auto& [k, c] : counts) h -= (c / n) * std::log(c / n);
  return h;
}

/// Per-node bin index on the layer's global [min, max], n_bins uniform bins,
/// the maximum in the last bin.
inline std::vector<std::vector<int>> bin_tuples(const Eigen::MatrixXd& f, int n_bins) {
  const double lo = f.minCoeff(), hi = f.maxCoeff();
  std::vector<std::vector<int>> out(static_cast<std::size_t>(f.cols()));
  for (Eigen::Index c = 0; c < f.cols(); ++c)
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
      int b = 0;
      if (hi > lo) b = std::min(n_bins - 1, static_cast<int>(std::floor((f(r, c) - lo) / (hi - lo) * n_bins)));
      out[static_cast<std::size_t>(c)].push_back(b);
    }
  return out;
}

/// Diagonal Gaussian log density, one coordinate at a time.
inline double diag_log_density(const Eigen::VectorXd& mu, const Eigen::VectorXd& sigma, const Eigen::VectorXd& z) {
  double s = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += std::log(normal_pdf(z(i), mu(i), sigma(i)));
  return s;
}

/// Central finite difference of f along coordinate i.
inline double central_difference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                 Eigen::Index i, double h) {
  const double x0 = x(i);
  x(i) = x0 + h;
  const double fp = f(x);
  x(i) = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2 * h);
}

}  // namespace ibgb::reference
