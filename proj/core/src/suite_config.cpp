#include "ibgb/suite_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "ibgb/errors.hpp"

namespace ibgb {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& s) {
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

template <class T, class F>
std::vector<T> parse_list(const std::string& s, F parse_one) {
  std::vector<T> out;
  for (const auto& item : split(s, ',')) {
    if (item.empty()) throw ConfigError("empty list item");
    out.push_back(parse_one(item));
  }
  return out;
}

std::vector<int> parse_arch(const std::string& s) {
  std::vector<int> widths;
  for (const auto& w : split(s, 'x')) widths.push_back(parse_number<int>(w));
  return widths;
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += fmt(xs[i]);
  }
  return out;
}

std::string arch_string(const std::vector<int>& widths) {
  return join(widths, [](int w) { return std::to_string(w); }, "x");
}

Optimizer parse_optimizer(const std::string& s) {
  if (s == "sgd") return Optimizer::sgd;
  if (s == "adam") return Optimizer::adam;
  throw ConfigError("unknown optimizer '" + s + "'");
}

ConstraintMode parse_constraint(const std::string& s) {
  if (s == "inequality") return ConstraintMode::inequality;
  if (s == "equality") return ConstraintMode::equality;
  throw ConfigError("unknown constraint_mode '" + s + "'");
}

SigmaMethod parse_sigma(const std::string& s) {
  if (s == "adaptive") return SigmaMethod::adaptive;
  if (s == "mle") return SigmaMethod::mle;
  throw ConfigError("unknown sigma_method '" + s + "'");
}

using Setter = std::function<void(SuiteConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table{
      {"suite",
       {
           {"kind", [](SuiteConfig& c, const std::string& v) { c.kind = parse_suite_kind(v); }},
           {"master_seed", [](SuiteConfig& c, const std::string& v) { c.master_seed = parse_number<std::uint64_t>(v); }},
           {"out", [](SuiteConfig& c, const std::string& v) { c.out_dir = v; }},
           {"jobs", [](SuiteConfig& c, const std::string& v) { c.jobs = parse_number<int>(v); }},
       }},
      {"grid",
       {
           {"architectures",
            [](SuiteConfig& c, const std::string& v) { c.architectures = parse_list<std::vector<int>>(v, parse_arch); }},
           {"weight_decays",
            [](SuiteConfig& c, const std::string& v) { c.weight_decays = parse_list<double>(v, parse_number<double>); }},
           {"dataset_seeds",
            [](SuiteConfig& c, const std::string& v) {
              c.dataset_seeds = parse_list<std::uint64_t>(v, parse_number<std::uint64_t>);
            }},
           {"model_seeds",
            [](SuiteConfig& c, const std::string& v) {
              c.model_seeds = parse_list<std::uint64_t>(v, parse_number<std::uint64_t>);
            }},
           {"eval_sizes", [](SuiteConfig& c, const std::string& v) { c.eval_sizes = parse_list<int>(v, parse_number<int>); }},
           {"ib", [](SuiteConfig& c, const std::string& v) { c.ib = parse_list<bool>(v, parse_bool); }},
       }},
      {"data",
       {
           {"n_train", [](SuiteConfig& c, const std::string& v) { c.n_train = parse_number<int>(v); }},
           {"n_test", [](SuiteConfig& c, const std::string& v) { c.n_test = parse_number<int>(v); }},
           {"n_classes", [](SuiteConfig& c, const std::string& v) { c.n_classes = parse_number<int>(v); }},
           {"task_seed", [](SuiteConfig& c, const std::string& v) { c.task_seed = parse_number<std::uint64_t>(v); }},
       }},
      {"train",
       {
           {"optimizer", [](SuiteConfig& c, const std::string& v) { c.train.optimizer = parse_optimizer(v); }},
           {"iterations", [](SuiteConfig& c, const std::string& v) { c.train.iterations = parse_number<int>(v); }},
           {"lr_theta", [](SuiteConfig& c, const std::string& v) { c.train.lr_theta = parse_number<double>(v); }},
           {"lr_lambda", [](SuiteConfig& c, const std::string& v) { c.train.lr_lambda = parse_number<double>(v); }},
           {"k", [](SuiteConfig& c, const std::string& v) { c.train.k = parse_number<int>(v); }},
           {"rho",
            [](SuiteConfig& c, const std::string& v) {
              if (v == "none")
                c.train.rho.reset();
              else
                c.train.rho = parse_number<double>(v);
            }},
           {"constraint_mode",
            [](SuiteConfig& c, const std::string& v) { c.train.constraint_mode = parse_constraint(v); }},
           {"lambda0", [](SuiteConfig& c, const std::string& v) { c.train.lambda0 = parse_number<double>(v); }},
           {"swag_start_fraction",
            [](SuiteConfig& c, const std::string& v) { c.train.swag_start_fraction = parse_number<double>(v); }},
           {"swag_sample_every",
            [](SuiteConfig& c, const std::string& v) { c.train.swag_sample_every = parse_number<int>(v); }},
           {"eval_k", [](SuiteConfig& c, const std::string& v) { c.train.eval_k = parse_number<int>(v); }},
           {"accept_accuracy",
            [](SuiteConfig& c, const std::string& v) { c.train.accept_accuracy = parse_number<double>(v); }},
           {"ib_penalty", [](SuiteConfig& c, const std::string& v) { c.ib_penalty = parse_number<double>(v); }},
       }},
      {"estimators",
       {
           {"feature_k", [](SuiteConfig& c, const std::string& v) { c.feature_k = parse_number<int>(v); }},
           {"model_k", [](SuiteConfig& c, const std::string& v) { c.model_k = parse_number<int>(v); }},
           {"kde_base", [](SuiteConfig& c, const std::string& v) { c.kde_base = parse_number<double>(v); }},
           {"sigma_method", [](SuiteConfig& c, const std::string& v) { c.sigma_method = parse_sigma(v); }},
           {"n_bins", [](SuiteConfig& c, const std::string& v) { c.n_bins = parse_number<int>(v); }},
       }},
      {"bounds",
       {
           {"n", [](SuiteConfig& c, const std::string& v) { c.bound_n = parse_number<std::size_t>(v); }},
           {"delta", [](SuiteConfig& c, const std::string& v) { c.bound_delta = parse_number<double>(v); }},
           {"trials", [](SuiteConfig& c, const std::string& v) { c.bound_trials = parse_number<int>(v); }},
       }},
  };
  return table;
}

}  // namespace

SuiteKind parse_suite_kind(const std::string& name) {
  if (name == "constrained2d") return SuiteKind::constrained2d;
  if (name == "unconstrained2d") return SuiteKind::unconstrained2d;
  if (name == "binning2d") return SuiteKind::binning2d;
  if (name == "bounds_verify") return SuiteKind::bounds_verify;
  throw ConfigError("unknown suite kind '" + name + "'");
}

std::string to_string(SuiteKind kind) {
  switch (kind) {
    case SuiteKind::constrained2d: return "constrained2d";
    case SuiteKind::unconstrained2d: return "unconstrained2d";
    case SuiteKind::binning2d: return "binning2d";
    case SuiteKind::bounds_verify: return "bounds_verify";
  }
  return "?";
}

std::size_t SuiteConfig::model_count() const {
  if (kind == SuiteKind::bounds_verify) return 0;
  const std::size_t cells = architectures.size() * weight_decays.size() * dataset_seeds.size() * model_seeds.size();
  return cells * (kind == SuiteKind::binning2d ? ib.size() : eval_sizes.size());
}

std::size_t SuiteConfig::trained_count() const {
  if (kind == SuiteKind::bounds_verify) return 0;
  const std::size_t cells = architectures.size() * weight_decays.size() * dataset_seeds.size() * model_seeds.size();
  return kind == SuiteKind::binning2d ? cells * ib.size() : cells;
}

void SuiteConfig::validate() const {
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (kind == SuiteKind::bounds_verify) {
    if (bound_n < 1 || !(bound_delta > 0 && bound_delta < 1) || bound_trials < 1)
      throw ConfigError("bounds: need n >= 1, 0 < delta < 1, trials >= 1");
    return;
  }
  if (architectures.empty() || weight_decays.empty() || model_seeds.empty())
    throw ConfigError("grid: empty architectures, weight_decays or model_seeds");
  if (dataset_seeds.size() < 2) throw ConfigError("grid: model MI needs at least two dataset_seeds");
  for (const auto& a : architectures)
    if (a.size() < 2) throw ConfigError("grid: an architecture needs trunk widths and a latent width");
  for (double wd : weight_decays)
    if (!(wd >= 0)) throw ConfigError("grid: weight decay must be >= 0");
  if (kind == SuiteKind::binning2d) {
    if (ib.empty()) throw ConfigError("grid: ib is empty");
  } else {
    if (eval_sizes.empty()) throw ConfigError("grid: eval_sizes is empty");
    for (int e : eval_sizes)
      if (e < 0 || e == 1) throw ConfigError("grid: eval sizes are 0 (training set) or >= 2");
  }
  if (n_train < 2 || n_test < 1 || n_classes < 2) throw ConfigError("data: need n_train >= 2, n_test >= 1, n_classes >= 2");
  if (n_train < n_classes) throw ConfigError("data: n_train must cover every class");
  if (feature_k < 1 || model_k < 1 || !(kde_base > 0) || n_bins < 2)
    throw ConfigError("estimators: need k >= 1, kde_base > 0, n_bins >= 2");
  if (!(ib_penalty >= 0)) throw ConfigError("train: ib_penalty must be >= 0");
  TrainConfig t = train;
  t.shape.widths = architectures.front();
  t.shape.n_classes = n_classes;
  try {
    t.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
}

SuiteConfig default_suite_config(SuiteKind kind) {
  SuiteConfig c;
  c.kind = kind;
  c.train.optimizer = Optimizer::adam;
  switch (kind) {
    case SuiteKind::constrained2d:
      c.train.rho = 1.5;
      break;
    case SuiteKind::unconstrained2d:
      break;
    case SuiteKind::binning2d:
      c.architectures = {{512, 512, 256, 256}, {256, 256, 128, 128}, {128, 128, 64, 64}};
      c.weight_decays = {0.0, 1e-3, 1e-2};
      c.eval_sizes = {0};
      c.train.shape.stochastic_latent = false;
      break;
    case SuiteKind::bounds_verify:
      break;
  }
  return c;
}

SuiteConfig smoke_suite_config(SuiteKind kind) {
  SuiteConfig c = default_suite_config(kind);
  c.architectures = {{32, 32, 16, 16}};
  c.weight_decays = {0.01};
  c.dataset_seeds = {0, 1};
  c.model_seeds = {0, 1};
  if (kind == SuiteKind::binning2d) c.architectures = {{64, 64, 32, 32}};
  c.bound_trials = 1000;
  return c;
}

SuiteConfig parse_suite_config(std::istream& is, SuiteConfig base) {
  const auto& table = setters();
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto where = [&] { return "config line " + std::to_string(lineno) + ": "; };
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where() + "malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!table.count(section)) throw ConfigError(where() + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
    if (section.empty()) throw ConfigError(where() + "key outside a section");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    const auto& keys = table.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(where() + "unknown key '" + key + "' in [" + section + "]");
    try {
      it->second(base, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
  }
  return base;
}

SuiteConfig load_suite_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  // The kind decides the defaults the file overrides.
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::istringstream probe(text);
  SuiteKind kind = SuiteKind::constrained2d;
  std::string line, section;
  while (std::getline(probe, line)) {
    const std::string t = trim(line.substr(0, line.find('#')));
    if (!t.empty() && t.front() == '[') section = trim(t.substr(1, t.size() - 2));
    const auto eq = t.find('=');
    if (section == "suite" && eq != std::string::npos && trim(t.substr(0, eq)) == "kind")
      kind = parse_suite_kind(trim(t.substr(eq + 1)));
  }
  std::istringstream is(text);
  return parse_suite_config(is, default_suite_config(kind));
}

void write_suite_config(std::ostream& os, const SuiteConfig& c) {
  const auto u64 = [](std::uint64_t v) { return std::to_string(v); };
  const auto& t = c.train;
  os << "[suite]\n"
     << "kind = " << to_string(c.kind) << "\n"
     << "master_seed = " << c.master_seed << "\n"
     << "out = " << c.out_dir.string() << "\n"
     << "jobs = " << c.jobs << "\n\n"
     << "[grid]\n"
     << "architectures = " << join(c.architectures, arch_string) << "\n"
     << "weight_decays = " << join(c.weight_decays, num) << "\n"
     << "dataset_seeds = " << join(c.dataset_seeds, u64) << "\n"
     << "model_seeds = " << join(c.model_seeds, u64) << "\n"
     << "eval_sizes = " << join(c.eval_sizes, [](int v) { return std::to_string(v); }) << "\n"
     << "ib = " << join(c.ib, [](bool b) { return std::string(b ? "on" : "off"); }) << "\n\n"
     << "[data]\n"
     << "n_train = " << c.n_train << "\n"
     << "n_test = " << c.n_test << "\n"
     << "n_classes = " << c.n_classes << "\n"
     << "task_seed = " << c.task_seed << "\n\n"
     << "[train]\n"
     << "optimizer = " << (t.optimizer == Optimizer::adam ? "adam" : "sgd") << "\n"
     << "iterations = " << t.iterations << "\n"
     << "lr_theta = " << num(t.lr_theta) << "\n"
     << "lr_lambda = " << num(t.lr_lambda) << "\n"
     << "k = " << t.k << "\n"
     << "rho = " << (t.rho ? num(*t.rho) : std::string("none")) << "\n"
     << "constraint_mode = " << (t.constraint_mode == ConstraintMode::equality ? "equality" : "inequality") << "\n"
     << "lambda0 = " << num(t.lambda0) << "\n"
     << "swag_start_fraction = " << num(t.swag_start_fraction) << "\n"
     << "swag_sample_every = " << t.swag_sample_every << "\n"
     << "eval_k = " << t.eval_k << "\n"
     << "accept_accuracy = " << num(t.accept_accuracy) << "\n"
     << "ib_penalty = " << num(c.ib_penalty) << "\n\n"
     << "[estimators]\n"
     << "feature_k = " << c.feature_k << "\n"
     << "model_k = " << c.model_k << "\n"
     << "kde_base = " << num(c.kde_base) << "\n"
     << "sigma_method = " << (c.sigma_method == SigmaMethod::mle ? "mle" : "adaptive") << "\n"
     << "n_bins = " << c.n_bins << "\n\n"
     << "[bounds]\n"
     << "n = " << c.bound_n << "\n"
     << "delta = " << num(c.bound_delta) << "\n"
     << "trials = " << c.bound_trials << "\n";
}

}  // namespace ibgb
