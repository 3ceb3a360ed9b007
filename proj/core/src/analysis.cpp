#include "ibgb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ibgb/errors.hpp"

namespace ibgb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_pair(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("correlation: length mismatch");
  if (xs.size() < 2) throw InvalidArgument("correlation: need at least two points");
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw InvalidArgument("correlation: non-finite value");
}

double clamp_unit(double r) { return std::clamp(r, -1.0, 1.0); }

// Sorts v by merge sort and returns the number of strictly inverted pairs.
long long merge_count(std::vector<double>& v, std::vector<double>& tmp, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long swaps = merge_count(v, tmp, lo, mid) + merge_count(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<long long>(mid - i);
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo), tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

// Sum over runs of equal values of t(t-1)/2; v must be sorted.
long long tied_pairs(const std::vector<double>& v) {
  long long s = 0, run = 1;
  for (std::size_t i = 1; i <= v.size(); ++i) {
    if (i < v.size() && v[i] == v[i - 1]) {
      ++run;
    } else {
      s += run * (run - 1) / 2;
      run = 1;
    }
  }
  return s;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : "null"; }

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  check_pair(xs, ys);
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw UndefinedCorrelation("pearson: zero variance");
  return clamp_unit(sxy / std::sqrt(sxx * syy));
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = mean_rank;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  check_pair(xs, ys);
  return pearson(average_ranks(xs), average_ranks(ys));
}

double kendall_tau_b(const std::vector<double>& xs, const std::vector<double>& ys) {
  check_pair(xs, ys);
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] < xs[b] || (xs[a] == xs[b] && ys[a] < ys[b]);
  });
  std::vector<double> sx(n), sy(n);
  for (std::size_t i = 0; i < n; ++i) {
    sx[i] = xs[order[i]];
    sy[i] = ys[order[i]];
  }
  const auto n0 = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;
  const long long n1 = tied_pairs(sx);
  // Pairs tied in both x and y.
  long long n3 = 0, run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && sx[i] == sx[i - 1] && sy[i] == sy[i - 1]) {
      ++run;
    } else {
      n3 += run * (run - 1) / 2;
      run = 1;
    }
  }
  // Within x-ties y is already sorted, so inversions count only discordant pairs.
  std::vector<double> tmp(n);
  const long long discordant = merge_count(sy, tmp, 0, n);
  const long long n2 = tied_pairs(sy);
  if (n0 == n1 || n0 == n2) throw UndefinedCorrelation("kendall: an argument is entirely tied");
  const long long concordant_minus_discordant = n0 - n1 - n2 + n3 - 2 * discordant;
  return clamp_unit(static_cast<double>(concordant_minus_discordant) /
                    std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2)));
}

double correlate(const std::vector<double>& xs, const std::vector<double>& ys, CorrelationMethod method) {
  switch (method) {
    case CorrelationMethod::pearson: return pearson(xs, ys);
    case CorrelationMethod::spearman: return spearman(xs, ys);
    case CorrelationMethod::kendall: return kendall_tau_b(xs, ys);
  }
  throw InvalidArgument("correlate: unknown method");
}

double summarize_layers(const std::vector<double>& values, LayerSummary mode, int fixed_layer) {
  if (values.empty()) throw InvalidArgument("summarize_layers: no layers");
  switch (mode) {
    case LayerSummary::min: return *std::min_element(values.begin(), values.end());
    case LayerSummary::max: return *std::max_element(values.begin(), values.end());
    case LayerSummary::mean:
      return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    case LayerSummary::fixed:
      if (fixed_layer < 1 || fixed_layer > static_cast<int>(values.size()))
        throw InvalidArgument("summarize_layers: fixed layer out of range");
      return values[static_cast<std::size_t>(fixed_layer - 1)];
  }
  throw InvalidArgument("summarize_layers: unknown mode");
}

std::vector<double> layer_frobenius_norms(const MlpParams& params) {
  const MlpShape& s = params.shape;
  std::vector<double> out;
  for (int l = 2; l <= s.depth() + 1; ++l) {
    double sq = 0.0;
    for (int b : s.layer_blocks(l)) sq += params.weight(b).squaredNorm() + params.bias(b).squaredNorm();
    out.push_back(std::sqrt(sq));
  }
  return out;
}

Baselines compute_baselines(const MlpParams& params) {
  Baselines b;
  b.num_params = static_cast<double>(params.shape.param_count());
  b.m_log_m = b.num_params * std::log(b.num_params);
  b.prod_frobenius = 1.0;
  for (double v : layer_frobenius_norms(params)) {
    b.sum_frobenius += v;
    b.prod_frobenius *= v;
  }
  return b;
}

std::size_t MetricTable::add_model(const std::string& id, double gl, double ge) {
  if (std::find(model_ids.begin(), model_ids.end(), id) != model_ids.end())
    throw InvalidArgument("MetricTable: duplicate model id " + id);
  model_ids.push_back(id);
  gap_loss.push_back(gl);
  gap_error.push_back(ge);
  for (auto& col : values) col.push_back(kNaN);
  return model_ids.size() - 1;
}

void MetricTable::set(const std::string& metric, std::size_t model, double value) {
  if (model >= model_ids.size()) throw InvalidArgument("MetricTable: model index out of range");
  auto it = std::find(metric_names.begin(), metric_names.end(), metric);
  std::size_t c = static_cast<std::size_t>(it - metric_names.begin());
  if (it == metric_names.end()) {
    metric_names.push_back(metric);
    values.emplace_back(model_ids.size(), kNaN);
  }
  values[c][model] = value;
}

bool MetricTable::has(const std::string& metric) const {
  return std::find(metric_names.begin(), metric_names.end(), metric) != metric_names.end();
}

const std::vector<double>& MetricTable::column(const std::string& metric) const {
  auto it = std::find(metric_names.begin(), metric_names.end(), metric);
  if (it == metric_names.end()) throw InvalidArgument("MetricTable: unknown metric " + metric);
  return values[static_cast<std::size_t>(it - metric_names.begin())];
}

bool MetricTable::operator==(const MetricTable& o) const {
  if (model_ids != o.model_ids || gap_loss != o.gap_loss || gap_error != o.gap_error ||
      metric_names != o.metric_names)
    return false;
  for (std::size_t c = 0; c < values.size(); ++c)
    for (std::size_t m = 0; m < model_ids.size(); ++m) {
      const double a = values[c][m], b = o.values[c][m];
      if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
    }
  return true;
}

std::string summary_name(const std::string& series, LayerSummary mode, int fixed_layer) {
  switch (mode) {
    case LayerSummary::min: return series + "[min]";
    case LayerSummary::max: return series + "[max]";
    case LayerSummary::mean: return series + "[mean]";
    case LayerSummary::fixed: return series + "[l=" + std::to_string(fixed_layer) + "]";
  }
  return series;
}

MetricTable build_metric_table(const std::vector<ModelMetrics>& runs,
                               const std::vector<std::pair<std::string, std::string>>& combinations) {
  MetricTable t;
  if (runs.empty()) return t;
  const auto& ref = runs.front();
  std::size_t n_layers = 0;
  for (const auto& [name, s] : ref.layer_series) {
    if (n_layers != 0 && s.size() != n_layers) throw InvalidArgument("build_metric_table: series lengths differ");
    n_layers = s.size();
  }
  for (const auto& r : runs) {
    if (r.layer_series.size() != ref.layer_series.size()) throw InvalidArgument("build_metric_table: series sets differ");
    for (const auto& [name, s] : r.layer_series) {
      auto it = ref.layer_series.find(name);
      if (it == ref.layer_series.end()) throw InvalidArgument("build_metric_table: series sets differ");
      if (s.size() != n_layers) throw InvalidArgument("build_metric_table: inconsistent layer counts");
    }
  }
  for (const auto& [a, b] : combinations)
    if (!ref.layer_series.count(a) || !ref.layer_series.count(b))
      throw InvalidArgument("build_metric_table: unknown series in combination " + a + "+" + b);

  auto emit_series = [&](std::size_t m, const std::string& name, const std::vector<double>& v) {
    t.set(summary_name(name, LayerSummary::min), m, summarize_layers(v, LayerSummary::min));
    t.set(summary_name(name, LayerSummary::max), m, summarize_layers(v, LayerSummary::max));
    t.set(summary_name(name, LayerSummary::mean), m, summarize_layers(v, LayerSummary::mean));
    for (int l = 1; l <= static_cast<int>(v.size()); ++l)
      t.set(summary_name(name, LayerSummary::fixed, l), m, summarize_layers(v, LayerSummary::fixed, l));
  };
  for (const auto& r : runs) {
    const std::size_t m = t.add_model(r.id, r.gap_loss, r.gap_error);
    for (const auto& [name, v] : r.scalars) t.set(name, m, v);
    for (const auto& [name, v] : r.layer_series) emit_series(m, name, v);
    for (const auto& [a, b] : combinations) {
      const auto& va = r.layer_series.at(a);
      const auto& vb = r.layer_series.at(b);
      std::vector<double> sum(va.size());
      for (std::size_t i = 0; i < va.size(); ++i) sum[i] = va[i] + vb[i];
      emit_series(m, a + "+" + b, sum);
    }
  }
  return t;
}

std::vector<CorrelationRow> correlate_table(const MetricTable& table, const std::string& group) {
  std::vector<CorrelationRow> rows;
  for (std::size_t c = 0; c < table.metric_names.size(); ++c) {
    for (const char* kind : {"loss", "error"}) {
      const auto& gaps = std::string(kind) == "loss" ? table.gap_loss : table.gap_error;
      std::vector<double> xs, ys;
      for (std::size_t m = 0; m < table.model_ids.size(); ++m)
        if (std::isfinite(table.values[c][m]) && std::isfinite(gaps[m])) {
          xs.push_back(table.values[c][m]);
          ys.push_back(gaps[m]);
        }
      CorrelationRow row;
      row.metric = table.metric_names[c];
      row.gap_kind = kind;
      row.n = xs.size();
      row.group = group;
      auto attempt = [&](CorrelationMethod method) -> std::optional<double> {
        if (xs.size() < 2) return std::nullopt;
        try {
          return correlate(xs, ys, method);
        } catch (const UndefinedCorrelation&) {
          return std::nullopt;
        }
      };
      row.spearman = attempt(CorrelationMethod::spearman);
      row.pearson = attempt(CorrelationMethod::pearson);
      row.kendall = attempt(CorrelationMethod::kendall);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_metrics_csv(std::ostream& os, const MetricTable& table) {
  os << "model_id,gap_loss,gap_error,metric,value\n";
  for (std::size_t m = 0; m < table.model_ids.size(); ++m) {
    // A model with no metrics still carries its gaps.
    if (table.metric_names.empty())
      os << table.model_ids[m] << ',' << fmt(table.gap_loss[m]) << ',' << fmt(table.gap_error[m]) << ",,\n";
    for (std::size_t c = 0; c < table.metric_names.size(); ++c) {
      os << table.model_ids[m] << ',' << fmt(table.gap_loss[m]) << ',' << fmt(table.gap_error[m]) << ','
         << table.metric_names[c] << ',';
      if (std::isnan(table.values[c][m]))
        os << "null";
      else
        os << fmt(table.values[c][m]);
      os << '\n';
    }
  }
}

MetricTable read_metrics_csv(std::istream& is) {
  MetricTable t;
  std::string line;
  if (!std::getline(is, line) || line != "model_id,gap_loss,gap_error,metric,value")
    throw InvalidArgument("read_metrics_csv: bad header");
  std::map<std::string, std::size_t> index;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) throw InvalidArgument("read_metrics_csv: bad row: " + line);
    auto it = index.find(f[0]);
    std::size_t m;
    if (it == index.end()) {
      m = t.add_model(f[0], std::stod(f[1]), std::stod(f[2]));
      index.emplace(f[0], m);
    } else {
      m = it->second;
    }
    if (f[3].empty()) continue;
    t.set(f[3], m, f[4] == "null" ? kNaN : std::stod(f[4]));
  }
  return t;
}

void write_correlations_csv(std::ostream& os, const std::vector<CorrelationRow>& rows) {
  os << "metric,gap_kind,spearman,pearson,kendall,n,group\n";
  for (const auto& r : rows)
    os << r.metric << ',' << r.gap_kind << ',' << fmt_opt(r.spearman) << ',' << fmt_opt(r.pearson) << ','
       << fmt_opt(r.kendall) << ',' << r.n << ',' << r.group << '\n';
}

Eigen::Vector3d polyfit2(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3) throw InvalidArgument("polyfit2: need >= 3 paired points");
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = xs[static_cast<std::size_t>(i)];
    A.row(i) << 1.0, x, x * x;
    b(i) = ys[static_cast<std::size_t>(i)];
  }
  return A.colPivHouseholderQr().solve(b);
}

void write_scatter_svg(std::ostream& os, const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::string& title, const std::string& x_label, const std::string& y_label) {
  if (xs.size() != ys.size()) throw InvalidArgument("write_scatter_svg: length mismatch");
  constexpr double W = 480, H = 360, L = 60, R = 20, T = 40, B = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!xs.empty()) {
    x0 = *std::min_element(xs.begin(), xs.end());
    x1 = *std::max_element(xs.begin(), xs.end());
    y0 = *std::min_element(ys.begin(), ys.end());
    y1 = *std::max_element(ys.begin(), ys.end());
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(title)
     << "</text>\n"
     << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << xml_escape(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << H / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << "<circle cx=\"" << fmt(px(xs[i])) << "\" cy=\"" << fmt(py(ys[i])) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  if (xs.size() >= 3) {
    const Eigen::Vector3d c = polyfit2(xs, ys);
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-dasharray=\"6 4\" points=\"";
    for (int k = 0; k <= 50; ++k) {
      const double x = x0 + (x1 - x0) * k / 50.0;
      const double y = std::clamp(c(0) + c(1) * x + c(2) * x * x, y0 - (y1 - y0), y1 + (y1 - y0));
      os << fmt(px(x)) << ',' << fmt(py(y)) << (k < 50 ? " " : "");
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace ibgb
