// Acceptance harness: one PASS/FAIL line per criterion.
//
// Exit status is 0 once every check has run (the report carries the verdicts);
// with --strict it is 1 when any criterion fails.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "ibgb/analysis.hpp"
#include "ibgb/bounds.hpp"
#include "ibgb/discrete.hpp"
#include "ibgb/errors.hpp"
#include "ibgb/mi_feature.hpp"
#include "ibgb/stochastic_mlp.hpp"
#include "ibgb/suite.hpp"
#include "support/reference.hpp"

using namespace ibgb;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

struct Verdict {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

class Report {
 public:
  void detail(Verdict& v, const std::string& line) {
    v.details.push_back(line);
    std::cout << "  [" << v.id << "] " << line << std::endl;
  }
  void finish(const Verdict& v) {
    const std::string line =
        std::string(v.pass ? "PASS" : "FAIL") + "  criterion " + std::to_string(v.id) + " (" + v.name + "): " + v.summary;
    std::cout << line << std::endl;
    verdicts_.push_back(v);
  }
  bool all_pass() const {
    for (const auto& v : verdicts_)
      if (!v.pass) return false;
    return true;
  }
  void write(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write report " + path.string());
    for (const auto& v : verdicts_)
      os << (v.pass ? "PASS" : "FAIL") << "  criterion " << v.id << " (" << v.name << "): " << v.summary << "\n";
    os << "\n";
    for (const auto& v : verdicts_) {
      os << "criterion " << v.id << " details\n";
      for (const auto& d : v.details) os << "  " << d << "\n";
    }
  }

 private:
  std::vector<Verdict> verdicts_;
};

int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// 1. Analytic gradients of CE + lambda * I_hat against central differences.
Verdict check_gradients(Report& rep) {
  Verdict v{1, "gradient correctness"};
  const auto t0 = Clock::now();
  Rng rng(20240101);
  std::uniform_int_distribution<int> width(2, 6), depth(2, 4), classes(2, 4), batch(4, 8), kk(2, 4);
  std::uniform_real_distribution<double> lam(0.0, 2.0);
  long checked = 0, bad = 0;
  double worst = 0;
  for (int net = 0; net < 50; ++net) {
    MlpShape s;
    s.widths.resize(static_cast<std::size_t>(depth(rng)));
    for (auto& w : s.widths) w = width(rng);
    s.n_classes = classes(rng);
    const auto p = MlpParams::init(s, rng);
    const int B = batch(rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(B, 2, [&] { return 4.0 * lam(rng) - 4.0; });
    std::vector<int> y(static_cast<std::size_t>(B));
    for (int i = 0; i < B; ++i) y[static_cast<std::size_t>(i)] = i % s.n_classes;
    const auto noise = draw_noise(s, B, kk(rng), rng);
    const double w = lam(rng);
    const auto lg = loss_and_grads(p, x, y, noise, w);
    auto f = [&](const Eigen::VectorXd& flat) { return loss_and_grads(MlpParams{s, flat}, x, y, noise, w).loss; };
    for (Eigen::Index i = 0; i < p.flat.size(); ++i) {
      const double fd = reference::central_difference(f, p.flat, i, 1e-6);
      const double err = std::abs(fd - lg.grad(i)) / std::max({std::abs(fd), std::abs(lg.grad(i)), 1e-5});
      worst = std::max(worst, err);
      ++checked;
      bad += err > 1e-4;
    }
  }
  const double secs = seconds_since(t0);
  const double frac = 1.0 - static_cast<double>(bad) / static_cast<double>(checked);
  rep.detail(v, std::to_string(checked) + " coordinates over 50 networks; " + std::to_string(bad) +
                    " above rel-err 1e-4 (denominator floored at 1e-5); worst " + fmt(worst));
  v.pass = frac >= 0.99 && secs < 30.0;
  v.summary = fmt(100 * frac, 5) + "% of coordinates within 1e-4 (need >= 99%), " + fmt(secs, 3) + " s (need < 30 s)";
  return v;
}

// 2. Feature-MI estimator against quadrature, and the Jensen ordering.
Verdict check_estimator(Report& rep) {
  Verdict v{2, "estimator oracle"};
  const int n = 2000;
  LatentBatch b;
  b.mu.resize(1, n);
  b.sigma = Eigen::MatrixXd::Ones(1, n);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = i % 2;
    b.mu(0, i) = i % 2 ? 5.0 : -5.0;
  }
  const double truth = reference::mixture_mi_quadrature({-5.0, 5.0}, 1.0);
  Rng rng(7);
  const auto s = estimate_feature_mi_all(b, y, 2, 64, rng);
  const double err = std::abs(s.mc - truth);
  rep.detail(v, "quadrature I = " + fmt(truth, 8) + ", I_hat = " + fmt(s.mc, 8) + ", |diff| = " + fmt(err));

  int ordered = 0;
  Rng gen(8);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.05, 2.0);
  std::uniform_int_distribution<int> dim(1, 4), size(6, 60);
  for (int t = 0; t < 100; ++t) {
    const int d = dim(gen), m = size(gen);
    LatentBatch r;
    r.mu = Eigen::MatrixXd::NullaryExpr(d, m, [&] { return 3.0 * g(gen); });
    r.sigma = Eigen::MatrixXd::NullaryExpr(d, m, [&] { return u(gen); });
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) labels[static_cast<std::size_t>(i)] = i % 3;
    const auto e = estimate_feature_mi_all(r, labels, 3, 1 + t % 8, gen);
    ordered += e.jensen >= e.mc && e.jensen_conditional >= e.mc_conditional;
  }
  rep.detail(v, "Ibreve >= Ihat (plain and conditional) in " + std::to_string(ordered) + "/100 trials");
  v.pass = err <= 0.05 && ordered == 100;
  v.summary = "|I_hat - I| = " + fmt(err) + " (need <= 0.05); ordering " + std::to_string(ordered) + "/100";
  return v;
}

// 3 and 6 share the constrained suite.
SuiteResult run_constrained(int jobs, const std::filesystem::path& out, double& secs) {
  SuiteConfig c = default_suite_config(SuiteKind::constrained2d);
  c.jobs = jobs;
  c.out_dir = out / "constrained2d";
  const auto t0 = Clock::now();
  SuiteResult r = run_suite(c);
  secs = seconds_since(t0);
  write_suite_outputs(r, c.out_dir);
  return r;
}

Verdict check_protocol(Report& rep, const SuiteResult& r, double secs, int jobs) {
  Verdict v{3, "constrained training protocol"};
  const double rho = *r.config.train.rho;
  int trained = 0, accepted = 0, within = 0;
  for (const auto& run : r.runs) {
    if (run.eval_size != 0) continue;  // one row per trained network
    ++trained;
    if (run.status != "accepted") continue;
    ++accepted;
    within += std::abs(run.final_mi - rho) <= 0.2;
  }
  const double frac = accepted ? static_cast<double>(within) / accepted : 0.0;
  rep.detail(v, std::to_string(r.runs.size()) + " model rows from " + std::to_string(trained) + " trained networks; " +
                    std::to_string(accepted) + " accepted (train accuracy >= 0.85)");
  rep.detail(v, std::to_string(within) + " accepted networks end within " + fmt(rho) + " +- 0.2");
  rep.detail(v, "wall time " + fmt(secs, 4) + " s with " + std::to_string(jobs) + " worker thread(s)");
  v.pass = frac >= 0.8 && secs <= 20 * 60 && r.runs.size() == 216;
  v.summary = fmt(100 * frac, 4) + "% of accepted within tolerance (need >= 80%), " + std::to_string(r.runs.size()) +
              " models in " + fmt(secs / 60, 3) + " min on " + std::to_string(jobs) + " core(s) (need <= 20 min)";
  return v;
}

// 4. Theorem verification on the shipped instances.
Verdict check_theorems(Report& rep) {
  Verdict v{4, "theorem verification"};
  const double limit = 0.05 + 3 * std::sqrt(0.05 * 0.95 / 1e4);
  bool ok = true;
  std::set<std::string> instances;
  std::set<BoundMode> modes;
  double worst_rate = 0, worst_secs = 0;
  for (const auto& ref : reference_instances()) {
    VerifyConfig cfg;
    cfg.delta = 0.05;
    cfg.trials = 10000;
    cfg.mode = ref.mode;
    cfg.layers = ref.layers;
    Rng rng = make_rng(4, {std::hash<std::string>{}(ref.instance.id)});
    const auto t0 = Clock::now();
    const auto verdict = verify_bound(ref.instance, cfg, rng);
    const double secs = seconds_since(t0);
    const bool good = verdict.violation_rate <= limit && secs <= 120;
    ok = ok && good;
    instances.insert(ref.instance.id.substr(0, 5));
    modes.insert(ref.mode);
    worst_rate = std::max(worst_rate, verdict.violation_rate);
    worst_secs = std::max(worst_secs, secs);
    rep.detail(v, verdict_json(verdict) + " in " + fmt(secs, 3) + " s");
  }
  v.pass = ok && instances.size() >= 3 && modes.size() == 2;
  v.summary = std::to_string(instances.size()) + " instances, both modes; worst violation rate " + fmt(worst_rate) +
              " (limit " + fmt(limit) + "), slowest " + fmt(worst_secs, 3) + " s (limit 120 s)";
  return v;
}

// 5. Lemma and proposition suite.
Verdict check_lemmas(Report& rep) {
  Verdict v{5, "lemma/proposition suite"};
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool all = true;
  auto part = [&](const std::string& name, bool ok, const std::string& info) {
    rep.detail(v, std::string(ok ? "ok   " : "FAIL ") + name + ": " + info);
    all = all && ok;
  };

  // Typical-set size, on random laws and on the instances' class-latent laws.
  int ts_checked = 0, ts_bad = 0;
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd p(3 + t % 20);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::pow(u(rng), 1 + t % 5);
    p /= p.sum();
    ++ts_checked;
    ts_bad += !compute_typical_set(p, 2.0 * u(rng)).within_bound();
  }
  for (const auto& ref : reference_instances()) {
    const auto& inst = ref.instance;
    if (!inst.nuisance) continue;
    for (int h = 0; h < inst.n_hypotheses(); ++h)
      for (int l = 1; l <= inst.depth(); ++l) {
        if (!inst.layer_deterministic(h, l)) continue;
        for (int y = 0; y < inst.n_classes(); ++y) {
          ++ts_checked;
          ts_bad += !compute_typical_set(inst, h, l, y, 1.0, 100).within_bound();
        }
      }
  }
  part("typical-set size <= 2^(H+eps)", ts_bad == 0, std::to_string(ts_checked - ts_bad) + "/" + std::to_string(ts_checked));

  // Hypothesis typical set.
  int hs_checked = 0, hs_bad = 0;
  double hs_min = 1.0;
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd p(2 + t % 40);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::pow(u(rng), 1 + t % 6);
    p /= p.sum();
    for (double lambda : {0.1, 0.5, 0.9}) {
      const auto hs = hypothesis_typical_set(p, lambda, 0.05);
      ++hs_checked;
      hs_min = std::min(hs_min, hs.probability);
      hs_bad += hs.probability < 0.95 - 1e-12;
    }
  }
  part("hypothesis typical set probability >= 1 - delta", hs_bad == 0,
       std::to_string(hs_checked - hs_bad) + "/" + std::to_string(hs_checked) + ", minimum " + fmt(hs_min, 6));

  // Multinomial concentration.
  const Eigen::VectorXd pm = (Eigen::VectorXd(6) << 0.4, 0.25, 0.15, 0.1, 0.07, 0.03).finished();
  Rng mrng(55);
  const auto sim = multinomial_concentration_sim(pm, 100, 0.05, 100000, mrng);
  const double slack = 3 * std::sqrt(0.05 * 0.95 / 1e5);
  part("multinomial per-coordinate violation rate <= delta", sim.violation_rate.maxCoeff() <= 0.05 + slack,
       "max rate " + fmt(sim.violation_rate.maxCoeff()) + " over 1e5 trials (delta 0.05, MC slack " + fmt(slack, 3) + ")");

  // Proposition 1 on random decaying sequences, printed form.
  int p1_bad = 0, p1_bad_sqrt = 0;
  double p1_worst = 0;
  for (int t = 0; t < 100; ++t) {
    const double alpha = 1.0 + 2.0 * u(rng), beta = 0.5 + 4.0 * u(rng);
    const double C = std::exp(std::log(0.01) + u(rng) * std::log(1000.0));  // log-uniform on [0.01, 10]
    std::vector<double> seq(80);
    for (std::size_t k = 0; k < seq.size(); ++k)
      seq[k] = C * std::exp(-std::pow(static_cast<double>(k + 1) / beta, alpha)) * (0.3 + 0.7 * u(rng));
    std::sort(seq.rbegin(), seq.rend());
    for (std::size_t k = 0; k < seq.size(); ++k)
      seq[k] = std::min(seq[k], C * std::exp(-std::pow(static_cast<double>(k + 1) / beta, alpha)));
    const auto r = prop1_g3_bound(seq, alpha, beta, C, 1 + t % 5);
    p1_bad += r.direct > r.bound;
    p1_bad_sqrt += r.direct > r.bound_sqrt_c;
    p1_worst = std::max(p1_worst, r.direct / r.bound);
  }
  part("Proposition 1 direct <= printed bound", p1_bad == 0,
       std::to_string(100 - p1_bad) + "/100 draws (C log-uniform on [0.01, 10]); worst direct/bound " +
           fmt(p1_worst) + "; with sqrt(C) in the tail term " + std::to_string(100 - p1_bad_sqrt) + "/100");

  // Proposition 2.
  bool p2_ok = true;
  std::string p2_info;
  for (double a : {2.0, 3.0, 4.0}) {
    Prop2Params pp;
    pp.alpha = a;
    pp.C = 2.0;
    pp.lambda = 0.25;
    pp.N = 10000;
    const auto r1 = prop2_clambda_bound(pp);
    pp.N = 20000;
    const auto r2 = prop2_clambda_bound(pp);
    const double drift = std::abs(r1.c_lambda - r2.c_lambda);
    const bool ok = r1.holds && r2.holds && drift < 1e-3;
    p2_ok = p2_ok && ok;
    p2_info += " alpha=" + fmt(a) + ": C_lambda " + fmt(r1.c_lambda, 6) + " <= " + fmt(r1.c_lambda_bound, 6) +
               ", H " + fmt(r1.entropy, 5) + " <= " + fmt(r1.entropy_bound, 5) + ", |dC_lambda(N->2N)| " +
               fmt(drift, 3) + (ok ? ";" : " (fails);");
  }
  Prop2Params slow;
  slow.decay = DecayCase::slow;
  slow.alpha = 0.0;
  slow.c = slow.C = 1.0;
  const auto rs = prop2_clambda_bound(slow);
  p2_ok = p2_ok && rs.holds && std::abs(rs.c_lambda - 1.0) < 1e-9;
  part("Proposition 2", p2_ok, p2_info + " uniform slow case C_lambda " + fmt(rs.c_lambda, 12));

  v.pass = all;
  v.summary = all ? "every sub-check holds" : "at least one sub-check fails (see details)";
  return v;
}

Verdict check_ordering(Report& rep, const SuiteResult& r) {
  Verdict v{6, "correlation ordering"};
  const std::string group = "eval=500";
  const std::string feat = penultimate(metric::feature_jensen_cond, r.config);
  const std::string comb = std::string(metric::model_rescaled) + "+" + feat;
  const auto* a = find_correlation(r.correlations, comb, "loss", group);
  const auto* b = find_correlation(r.correlations, feat, "loss", group);
  const auto* m = find_correlation(r.correlations, metric::num_params, "loss", group);
  if (!a || !b || !m || !a->pearson || !b->pearson || !m->pearson) {
    v.summary = "a required correlation is missing or undefined";
    return v;
  }
  rep.detail(v, "group " + group + ", loss gap, n = " + std::to_string(a->n));
  rep.detail(v, "Pearson " + comb + " = " + fmt(*a->pearson, 6) + ", Spearman " + fmt(a->spearman.value_or(NAN)) +
                    ", Kendall " + fmt(a->kendall.value_or(NAN)));
  rep.detail(v, "Pearson " + feat + " = " + fmt(*b->pearson, 6) + ", Spearman " + fmt(b->spearman.value_or(NAN)) +
                    ", Kendall " + fmt(b->kendall.value_or(NAN)));
  rep.detail(v, "Pearson num_params = " + fmt(*m->pearson, 6));
  const bool order = *a->pearson >= *b->pearson - 0.05;
  const bool baseline = std::abs(*m->pearson) < 0.15;
  v.pass = order && baseline;
  v.summary = std::string("combined ") + fmt(*a->pearson) + (order ? " >= " : " < ") + "feature-only " +
              fmt(*b->pearson) + " - 0.05; |Pearson(num_params)| = " + fmt(std::abs(*m->pearson)) +
              (baseline ? " < 0.15" : " >= 0.15");
  return v;
}

// 7. Binning experiment direction over three repetitions.
Verdict check_binning(Report& rep, int jobs, const std::filesystem::path& out) {
  Verdict v{7, "binning experiment direction"};
  int agree = 0;
  const int reps = 3;
  for (int s = 0; s < reps; ++s) {
    SuiteConfig c = default_suite_config(SuiteKind::binning2d);
    c.master_seed = static_cast<std::uint64_t>(s);
    c.jobs = jobs;
    c.out_dir = out / ("binning2d_seed" + std::to_string(s));
    const auto t0 = Clock::now();
    const auto r = run_suite(c);
    const double secs = seconds_since(t0);
    write_suite_outputs(r, c.out_dir);
    double off = 0, on = 0;
    bool defined = true;
    std::string info;
    for (const char* series : {metric::feature_mc, metric::feature_mc_cond}) {
      const std::string name = penultimate(series, c);
      const auto* f = find_correlation(r.correlations, name, "loss", "ib=off");
      const auto* n = find_correlation(r.correlations, name, "loss", "ib=on");
      if (!f || !n || !f->spearman || !n->spearman) {
        defined = false;
        info += " " + name + " undefined;";
        continue;
      }
      off += *f->spearman / 2;
      on += *n->spearman / 2;
      info += " " + name + " off " + fmt(*f->spearman) + " on " + fmt(*n->spearman) + ";";
    }
    const bool drop = defined && on < off;
    agree += drop;
    rep.detail(v, "seed " + std::to_string(s) + " (" + fmt(secs, 4) + " s):" + info + " mean Spearman off " + fmt(off) +
                      " on " + fmt(on) + (drop ? " -> drops" : " -> does not drop"));
  }
  v.pass = 2 * agree > reps;
  v.summary = "feature-compression Spearman drops with IB on in " + std::to_string(agree) + "/" +
              std::to_string(reps) + " repetitions (need majority)";
  return v;
}

// 8. Correlation coefficients against definitional implementations.
Verdict check_correlations(Report& rep) {
  Verdict v{8, "correlation oracle"};
  Rng rng(8);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> level(0, 7);
  double worst = 0;
  for (bool ties : {false, true}) {
    double w = 0;
    for (int rep_i = 0; rep_i < 10; ++rep_i) {
      std::vector<double> x(1000), y(1000);
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = ties ? level(rng) : g(rng);
        y[i] = ties ? (i % 4 == 0 ? x[i] : level(rng)) : 0.3 * x[i] + g(rng);
      }
      w = std::max({w, std::abs(pearson(x, y) - reference::pearson(x, y)),
                    std::abs(spearman(x, y) - reference::spearman(x, y)),
                    std::abs(kendall_tau_b(x, y) - reference::kendall_tau_b(x, y))});
    }
    rep.detail(v, std::string(ties ? "with" : "without") + " ties: 10 pairs of length-1000 vectors, max |diff| " +
                      fmt(w, 3));
    worst = std::max(worst, w);
  }
  v.pass = worst <= 1e-12;
  v.summary = "max deviation " + fmt(worst, 3) + " (need <= 1e-12)";
  return v;
}

// 9. Chain rule on enumerable instances.
Verdict check_chain_rule(Report& rep) {
  Verdict v{9, "chain rule"};
  double worst = 0;
  long checked = 0;
  std::vector<DiscreteInstance> worlds;
  for (const auto& ref : reference_instances()) worlds.push_back(ref.instance);
  for (std::uint64_t s = 0; s < 20; ++s) {
    DiscreteSpec spec;
    spec.seed = 900 + s;
    spec.n_classes = 2 + static_cast<int>(s % 3);
    spec.encoder_noise = 0.15 * static_cast<double>(s % 4);
    spec.hidden_sizes = {4 + static_cast<int>(s % 3), 3};
    worlds.push_back(gen_discrete_instance(spec));
  }
  for (const auto& inst : worlds)
    for (int h = 0; h < inst.n_hypotheses(); ++h)
      for (int l = 1; l <= inst.depth() + 1; ++l) {
        const auto li = layer_information(inst, h, l);
        worst = std::max(worst, std::abs(li.i_xz - li.i_xz_given_y - li.i_yz));
        ++checked;
      }
  rep.detail(v, std::to_string(worlds.size()) + " instances, " + std::to_string(checked) + " (hypothesis, layer) pairs");
  v.pass = worst <= 1e-10;
  v.summary = "max |I(X;Z) - I(X;Z|Y) - I(Y;Z)| = " + fmt(worst, 3) + " (need <= 1e-10)";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks; prints one PASS/FAIL line per criterion."};
  std::string report_path;
  std::string out_dir = (std::filesystem::temp_directory_path() / "ibgb_acceptance").string();
  std::vector<int> only;
  int jobs = default_jobs();
  bool strict = false;
  app.add_option("--report", report_path, "Also write the report to this file");
  app.add_option("--out", out_dir, "Directory for suite outputs");
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 9));
  app.add_option("--jobs", jobs, "Worker threads for the suites")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "Exit nonzero when a criterion fails");
  CLI11_PARSE(app, argc, argv);

  auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  Report rep;
  const auto t0 = Clock::now();
  try {
    if (want(1)) rep.finish(check_gradients(rep));
    if (want(2)) rep.finish(check_estimator(rep));
    if (want(3) || want(6)) {
      double secs = 0;
      const auto r = run_constrained(jobs, out_dir, secs);
      if (want(3)) rep.finish(check_protocol(rep, r, secs, jobs));
      if (want(6)) rep.finish(check_ordering(rep, r));
    }
    if (want(4)) rep.finish(check_theorems(rep));
    if (want(5)) rep.finish(check_lemmas(rep));
    if (want(7)) rep.finish(check_binning(rep, jobs, out_dir));
    if (want(8)) rep.finish(check_correlations(rep));
    if (want(9)) rep.finish(check_chain_rule(rep));
  } catch (const std::exception& e) {
    std::cerr << "acceptance: aborted: " << e.what() << "\n";
    return 2;
  }
  std::cout << "total " << fmt(seconds_since(t0), 5) << " s; suite outputs in " << out_dir << std::endl;
  if (!report_path.empty()) rep.write(report_path);
  return strict && !rep.all_pass() ? 1 : 0;
}
