#include "ibgb/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "ibgb/errors.hpp"

namespace ibgb {

std::vector<std::vector<std::size_t>> LabeledSample::class_members() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(y[i])].push_back(i);
  return out;
}

ClusterTask ClusterTask::make(std::uint64_t task_seed, int n_classes, double half_width,
                              double cluster_std) {
  if (n_classes < 2) throw InvalidArgument("ClusterTask: need at least two classes");
  Rng rng = make_rng(task_seed, {0xC3A7E5});
  std::uniform_real_distribution<double> u(-half_width, half_width);
  ClusterTask t;
  t.centers.resize(n_classes, 2);
  for (int c = 0; c < n_classes; ++c) {
    t.centers(c, 0) = u(rng);
    t.centers(c, 1) = u(rng);
  }
  t.cluster_std = cluster_std;
  return t;
}

LabeledSample ClusterTask::draw(std::size_t n, Rng& rng) const {
  const int c = n_classes();
  LabeledSample s;
  s.n_classes = c;
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.y[i] = static_cast<int>(i % static_cast<std::size_t>(c));
  std::shuffle(s.y.begin(), s.y.end(), rng);
  std::normal_distribution<double> g(0.0, cluster_std);
  s.x.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    s.x(row, 0) = centers(s.y[i], 0) + g(rng);
    s.x(row, 1) = centers(s.y[i], 1) + g(rng);
  }
  return s;
}

LabeledSample LabeledDataset::subset(const std::vector<std::size_t>& idx) const {
  LabeledSample s;
  s.n_classes = n_classes;
  s.x.resize(static_cast<Eigen::Index>(idx.size()), inputs.cols());
  s.y.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    s.x.row(static_cast<Eigen::Index>(i)) = inputs.row(static_cast<Eigen::Index>(idx[i]));
    s.y[i] = labels[idx[i]];
  }
  return s;
}

LabeledDataset gen_clusters(std::uint64_t seed, std::size_t n_train, std::size_t n_test, int n_classes,
                            std::uint64_t task_seed) {
  if (n_train == 0 || n_test == 0) throw InvalidArgument("gen_clusters: zero sample count");
  if (n_classes < 2) throw InvalidArgument("gen_clusters: n_classes must be >= 2");
  const auto nc = static_cast<std::size_t>(n_classes);
  if (n_train < nc || n_test < nc) throw InvalidArgument("gen_clusters: counts must be >= n_classes");

  const ClusterTask task = ClusterTask::make(task_seed, n_classes);
  Rng rng = make_rng(seed, {0xDA7A});
  // Train and test are drawn separately so each split is balanced on its own.
  LabeledSample tr = task.draw(n_train, rng);
  LabeledSample te = task.draw(n_test, rng);

  LabeledDataset ds;
  ds.n_classes = n_classes;
  ds.seed = seed;
  ds.inputs.resize(static_cast<Eigen::Index>(n_train + n_test), 2);
  ds.inputs.topRows(static_cast<Eigen::Index>(n_train)) = tr.x;
  ds.inputs.bottomRows(static_cast<Eigen::Index>(n_test)) = te.x;
  ds.labels = tr.y;
  ds.labels.insert(ds.labels.end(), te.y.begin(), te.y.end());
  for (std::size_t i = 0; i < n_train; ++i) ds.train_idx.push_back(i);
  for (std::size_t i = 0; i < n_test; ++i) ds.test_idx.push_back(n_train + i);
  return ds;
}

void write_dataset_csv(std::ostream& os, const LabeledDataset& ds) {
  os << "x0,x1,label,split\n";
  std::vector<char> split(ds.labels.size(), 0);
  for (auto i : ds.train_idx) split[i] = 't';
  for (auto i : ds.test_idx) split[i] = 'e';
  char buf[64];
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    if (!split[i]) continue;
    const auto r = static_cast<Eigen::Index>(i);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", ds.inputs(r, 0), ds.inputs(r, 1));
    os << buf << ',' << ds.labels[i] << ',' << (split[i] == 't' ? "train" : "test") << '\n';
  }
}

LabeledDataset read_dataset_csv(std::istream& is, int n_classes) {
  std::string line;
  if (!std::getline(is, line) || line != "x0,x1,label,split")
    throw InvalidArgument("read_dataset_csv: bad header");
  std::vector<double> xs;
  LabeledDataset ds;
  ds.n_classes = n_classes;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, l, sp;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, l, ',') ||
        !std::getline(ss, sp))
      throw InvalidArgument("read_dataset_csv: malformed row: " + line);
    xs.push_back(std::stod(a));
    xs.push_back(std::stod(b));
    const int label = std::stoi(l);
    if (label < 0 || label >= n_classes) throw InvalidArgument("read_dataset_csv: label out of range");
    const std::size_t i = ds.labels.size();
    ds.labels.push_back(label);
    if (sp == "train")
      ds.train_idx.push_back(i);
    else if (sp == "test")
      ds.test_idx.push_back(i);
    else
      throw InvalidArgument("read_dataset_csv: bad split '" + sp + "'");
  }
  ds.inputs.resize(static_cast<Eigen::Index>(ds.labels.size()), 2);
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    ds.inputs(static_cast<Eigen::Index>(i), 0) = xs[2 * i];
    ds.inputs(static_cast<Eigen::Index>(i), 1) = xs[2 * i + 1];
  }
  return ds;
}

}  // namespace ibgb
