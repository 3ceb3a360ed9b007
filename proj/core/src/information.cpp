#include "ibgb/information.hpp"

#include <cmath>
#include <unordered_map>

#include "ibgb/errors.hpp"

namespace ibgb {

double entropy(std::span<const double> pmf, LogBase base) {
  double h = 0.0;
  for (double p : pmf) {
    if (p < 0.0) throw InvalidArgument("entropy: negative probability");
    if (p > 0.0) h -= p * std::log(p);
  }
  return in_base(h, base);
}

double entropy(const Eigen::VectorXd& pmf, LogBase base) {
  return entropy(std::span<const double>(pmf.data(), static_cast<std::size_t>(pmf.size())), base);
}

double mutual_information(const Eigen::MatrixXd& joint, LogBase base) {
  const Eigen::VectorXd pa = joint.rowwise().sum();
  const Eigen::RowVectorXd pb = joint.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index a = 0; a < joint.rows(); ++a) {
    for (Eigen::Index b = 0; b < joint.cols(); ++b) {
      const double p = joint(a, b);
      if (p > 0.0) mi += p * std::log(p / (pa(a) * pb(b)));
    }
  }
  return in_base(mi, base);
}

double conditional_entropy(const Eigen::MatrixXd& joint, LogBase base) {
  double h = 0.0;
  for (Eigen::Index a = 0; a < joint.rows(); ++a) {
    const double pa = joint.row(a).sum();
    for (Eigen::Index b = 0; b < joint.cols(); ++b) {
      const double p = joint(a, b);
      if (p > 0.0) h -= p * std::log(p / pa);
    }
  }
  return in_base(h, base);
}

double conditional_mutual_information(std::span<const Eigen::MatrixXd> slices, LogBase base) {
  double mi = 0.0;
  for (const auto& s : slices) {
    const double pc = s.sum();
    if (pc <= 0.0) continue;
    mi += pc * mutual_information(s / pc, LogBase::nats);
  }
  return in_base(mi, base);
}

double empirical_entropy(std::span<const long long> symbols, LogBase base) {
  if (symbols.empty()) return 0.0;
  std::unordered_map<long long, std::size_t> counts;
  for (long long s : symbols) ++counts[s];
  const double n = static_cast<double>(symbols.size());
  double h = 0.0;
  for (const auto& [sym, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return in_base(h, base);
}

}  // namespace ibgb
