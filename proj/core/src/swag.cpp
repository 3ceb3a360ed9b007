#include "ibgb/swag.hpp"

#include "ibgb/errors.hpp"

namespace ibgb {

std::size_t SwagPosterior::slice_size(int layer) const {
  if (layer < 1 || layer > n_layers()) throw InvalidArgument("slice_size: layer out of range");
  return layer_slices[static_cast<std::size_t>(layer - 1)];
}

void SwagAccumulator::add(const Eigen::VectorXd& w) {
  if (n_ == 0) {
    mean_ = Eigen::VectorXd::Zero(w.size());
    m2_ = Eigen::VectorXd::Zero(w.size());
  } else if (w.size() != mean_.size()) {
    throw InvalidArgument("SwagAccumulator: iterate dimension changed");
  }
  ++n_;
  const Eigen::VectorXd d = w - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_.array() += d.array() * (w - mean_).array();
}

Eigen::VectorXd SwagAccumulator::raw_variance() const {
  if (n_ < 2) throw InvalidArgument("SWAG needs at least two iterates");
  return m2_ / static_cast<double>(n_);
}

SwagPosterior SwagAccumulator::finalize(std::vector<std::size_t> layer_slices) const {
  SwagPosterior p;
  p.var = raw_variance().cwiseMax(kSwagVarFloor);
  p.mean = mean_;
  const auto dim = static_cast<std::size_t>(mean_.size());
  if (layer_slices.empty()) layer_slices.push_back(dim);
  for (std::size_t i = 0; i < layer_slices.size(); ++i) {
    if (layer_slices[i] > dim || (i > 0 && layer_slices[i] < layer_slices[i - 1]))
      throw InvalidArgument("SWAG layer slices must be nested prefixes");
  }
  if (layer_slices.back() != dim) throw InvalidArgument("last SWAG slice must cover all coordinates");
  p.layer_slices = std::move(layer_slices);
  return p;
}

SwagPosterior fit_swag(const std::vector<Eigen::VectorXd>& iterates, std::vector<std::size_t> layer_slices) {
  if (iterates.size() < 2) throw InvalidArgument("fit_swag: need at least two iterates");
  SwagAccumulator acc;
  for (const auto& w : iterates) acc.add(w);
  return acc.finalize(std::move(layer_slices));
}

}  // namespace ibgb
