#include "ibgb/suite.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "ibgb/dataset.hpp"
#include "ibgb/errors.hpp"
#include "ibgb/mi_feature.hpp"
#include "ibgb/mi_model.hpp"
#include "ibgb/trainer.hpp"
#include "json.hpp"

namespace ibgb {

namespace {

// Stream tags for derive_seed.
enum : std::uint64_t { kTagInit = 1, kTagData = 2, kTagEval = 3, kTagFeature = 4, kTagModelMi = 5, kTagBounds = 6 };

/// Runs f(i) for i in [0, n) on `jobs` threads; exceptions are rethrown after all finish.
template <class F>
void parallel_for(std::size_t n, int jobs, F f) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

/// A trained network's grid coordinates.
struct Cell {
  std::size_t arch = 0, wd = 0, ds = 0, seed = 0, ib = 0;
};

struct Trained {
  std::optional<TrainedModel> model;
  std::string error;
};

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string arch_id(const std::vector<int>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "x" : "") + std::to_string(w[i]);
  return s;
}

bool is_binning(const SuiteConfig& c) { return c.kind == SuiteKind::binning2d; }

std::string group_name(const SuiteConfig& c, const Cell& cell, std::size_t eval_index) {
  if (is_binning(c)) return c.ib[cell.ib] ? "ib=on" : "ib=off";
  const int e = c.eval_sizes[eval_index];
  return e == 0 ? "eval=train" : "eval=" + std::to_string(e);
}

std::vector<Cell> enumerate_cells(const SuiteConfig& c) {
  std::vector<Cell> cells;
  const std::size_t n_ib = is_binning(c) ? c.ib.size() : 1;
  for (std::size_t a = 0; a < c.architectures.size(); ++a)
    for (std::size_t w = 0; w < c.weight_decays.size(); ++w)
      for (std::size_t i = 0; i < n_ib; ++i)
        for (std::size_t d = 0; d < c.dataset_seeds.size(); ++d)
          for (std::size_t g = 0; g < c.model_seeds.size(); ++g) cells.push_back({a, w, d, g, i});
  return cells;
}

TrainConfig cell_train_config(const SuiteConfig& c, const Cell& cell) {
  TrainConfig t = c.train;
  t.shape.input_dim = 2;
  t.shape.n_classes = c.n_classes;
  t.shape.widths = c.architectures[cell.arch];
  t.weight_decay = c.weight_decays[cell.wd];
  // The init seed is shared across dataset draws: it is part of the learning algorithm.
  t.seed = derive_seed(c.master_seed, {kTagInit, c.architectures[cell.arch].size(),
                                       static_cast<std::uint64_t>(cell.arch), static_cast<std::uint64_t>(cell.wd),
                                       c.model_seeds[cell.seed], static_cast<std::uint64_t>(cell.ib)});
  if (is_binning(c)) {
    const bool ib = c.ib[cell.ib];
    t.shape.stochastic_latent = ib;
    t.rho.reset();
    t.mi_penalty = ib ? c.ib_penalty : 0.0;
  }
  return t;
}

LabeledDataset cell_dataset(const SuiteConfig& c, std::size_t ds) {
  return gen_clusters(derive_seed(c.master_seed, {kTagData, c.dataset_seeds[ds]}), static_cast<std::size_t>(c.n_train),
                      static_cast<std::size_t>(c.n_test), c.n_classes, c.task_seed);
}

/// Fresh points from the generator, shared by every model trained on draw `ds`.
LabeledSample eval_sample(const SuiteConfig& c, std::size_t ds, int size) {
  const ClusterTask task = ClusterTask::make(c.task_seed, c.n_classes);
  Rng rng = make_rng(c.master_seed, {kTagEval, c.dataset_seeds[ds], static_cast<std::uint64_t>(size)});
  return task.draw(static_cast<std::size_t>(size), rng);
}

std::string run_id(const SuiteConfig& c, const Cell& cell, std::size_t eval_index) {
  std::string id = "a" + arch_id(c.architectures[cell.arch]) + "_wd" + fmt_double(c.weight_decays[cell.wd]) + "_d" +
                   std::to_string(c.dataset_seeds[cell.ds]) + "_s" + std::to_string(c.model_seeds[cell.seed]);
  if (is_binning(c)) return id + (c.ib[cell.ib] ? "_ibon" : "_iboff");
  const int e = c.eval_sizes[eval_index];
  return id + (e == 0 ? "_etrain" : "_e" + std::to_string(e));
}

/// Feature MI per layer 1..D on `sample`.
void feature_metrics(const SuiteConfig& c, const Cell& cell, std::size_t eval_index, const MlpParams& p,
                     const LabeledSample& sample, RunRecord& r) {
  const Activations act = forward_features(p, sample.x);
  // Deterministic layers: input, then trunk.
  std::vector<Eigen::MatrixXd> det;
  det.push_back(sample.x.transpose());
  for (const auto& h : act.trunk) det.push_back(h);
  const int D = p.shape.depth();

  if (is_binning(c)) {
    det.push_back(act.mu);
    std::vector<double> mc, cond;
    for (const auto& f : det) {
      mc.push_back(binned_mi(f, c.n_bins));
      cond.push_back(binned_mi(f, c.n_bins, sample.y));
    }
    r.series[metric::feature_mc] = mc;
    r.series[metric::feature_mc_cond] = cond;
    r.sigma.assign(static_cast<std::size_t>(D), 0.0);
    return;
  }

  Rng sigma_rng = make_rng(c.master_seed, {kTagFeature, static_cast<std::uint64_t>(cell.arch),
                                           static_cast<std::uint64_t>(cell.wd), c.dataset_seeds[cell.ds],
                                           c.model_seeds[cell.seed], static_cast<std::uint64_t>(eval_index), 0});
  const SigmaSchedule sched = c.sigma_method == SigmaMethod::mle
                                  ? select_sigma_mle(det, default_sigma_grid(), c.feature_k, sigma_rng)
                                  : select_sigma_adaptive(det, c.kde_base);
  std::vector<double> mc, jn, mcc, jnc;
  r.sigma.clear();
  for (int l = 1; l <= D; ++l) {
    LatentBatch lat;
    if (l < D) {
      lat = LatentBatch::kernel(det[static_cast<std::size_t>(l - 1)], sched.sigma[static_cast<std::size_t>(l - 1)]);
      r.sigma.push_back(sched.sigma[static_cast<std::size_t>(l - 1)]);
    } else {
      lat.mu = act.mu;
      lat.sigma = act.sigma;
      r.sigma.push_back(0.0);
    }
    Rng rng = make_rng(c.master_seed, {kTagFeature, static_cast<std::uint64_t>(cell.arch),
                                       static_cast<std::uint64_t>(cell.wd), c.dataset_seeds[cell.ds],
                                       c.model_seeds[cell.seed], static_cast<std::uint64_t>(eval_index),
                                       static_cast<std::uint64_t>(l)});
    const FeatureMiSet s = estimate_feature_mi_all(lat, sample.y, c.n_classes, c.feature_k, rng);
    mc.push_back(s.mc);
    jn.push_back(s.jensen);
    mcc.push_back(s.mc_conditional);
    jnc.push_back(s.jensen_conditional);
  }
  r.series[metric::feature_mc] = mc;
  r.series[metric::feature_jensen] = jn;
  r.series[metric::feature_mc_cond] = mcc;
  r.series[metric::feature_jensen_cond] = jnc;
}

/// Key of a learning algorithm without the seed (for seed-averaged model MI).
struct AlgoKey {
  std::size_t arch, wd, ib;
  auto operator<=>(const AlgoKey&) const = default;
};

}  // namespace

std::vector<std::pair<std::string, std::string>> suite_combinations(SuiteKind kind) {
  using namespace metric;
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> features{feature_mc, feature_mc_cond};
  if (kind != SuiteKind::binning2d) features = {feature_mc, feature_mc_cond, feature_jensen, feature_jensen_cond};
  for (const char* m : {model_jensen, model_rescaled})
    for (const auto& f : features) out.emplace_back(m, f);
  out.emplace_back(model_seed_avg, feature_mc_cond);
  if (kind != SuiteKind::binning2d) out.emplace_back(model_seed_avg, feature_jensen_cond);
  return out;
}

std::vector<std::string> suite_groups(const SuiteConfig& config) {
  std::vector<std::string> out;
  if (config.kind == SuiteKind::bounds_verify) return out;
  if (is_binning(config)) {
    for (std::size_t i = 0; i < config.ib.size(); ++i) out.push_back(group_name(config, Cell{0, 0, 0, 0, i}, 0));
  } else {
    for (std::size_t e = 0; e < config.eval_sizes.size(); ++e) out.push_back(group_name(config, Cell{}, e));
  }
  return out;
}

std::string penultimate(const std::string& series, const SuiteConfig& config) {
  return summary_name(series, LayerSummary::fixed, static_cast<int>(config.architectures.front().size()) + 1);
}

const CorrelationRow* find_correlation(const std::vector<CorrelationRow>& rows, const std::string& metric_name,
                                       const std::string& gap_kind, const std::string& group) {
  for (const auto& r : rows)
    if (r.metric == metric_name && r.gap_kind == gap_kind && r.group == group) return &r;
  return nullptr;
}

SuiteResult run_suite(const SuiteConfig& config, const SuiteLog& log) {
  config.validate();
  SuiteResult res;
  res.config = config;
  std::mutex log_mu;
  const auto say = [&](const std::string& msg) {
    if (!log) return;
    std::lock_guard<std::mutex> lock(log_mu);
    log(msg);
  };

  if (config.kind == SuiteKind::bounds_verify) {
    const auto refs = reference_instances();
    res.verdicts.resize(refs.size());
    parallel_for(refs.size(), config.jobs, [&](std::size_t i) {
      VerifyConfig vc;
      vc.n = config.bound_n;
      vc.delta = config.bound_delta;
      vc.trials = config.bound_trials;
      vc.mode = refs[i].mode;
      vc.layers = refs[i].layers;
      Rng rng = make_rng(config.master_seed, {kTagBounds, i});
      res.verdicts[i] = verify_bound(refs[i].instance, vc, rng);
      say("verified " + refs[i].instance.id + " violation_rate=" + fmt_double(res.verdicts[i].violation_rate));
    });
    return res;
  }

  // Phase 1: train every cell.
  const std::vector<Cell> cells = enumerate_cells(config);
  std::vector<LabeledDataset> datasets;
  for (std::size_t d = 0; d < config.dataset_seeds.size(); ++d) datasets.push_back(cell_dataset(config, d));
  std::vector<Trained> trained(cells.size());
  std::atomic<std::size_t> done{0};
  parallel_for(cells.size(), config.jobs, [&](std::size_t i) {
    const TrainConfig tc = cell_train_config(config, cells[i]);
    try {
      trained[i].model = train(tc, datasets[cells[i].ds]);
    } catch (const TrainingDiverged& e) {
      trained[i].error = std::string(e.what()) + " at iteration " + std::to_string(e.iteration());
    }
    say("trained " + std::to_string(++done) + "/" + std::to_string(cells.size()) + " " + run_id(config, cells[i], 0));
  });

  // Phase 2: model MI per learning algorithm (jensen) and per seed-free algorithm (seed-averaged).
  const std::size_t n_ds = config.dataset_seeds.size(), n_seed = config.model_seeds.size();
  auto cell_index = [&](std::size_t a, std::size_t w, std::size_t ib, std::size_t d, std::size_t g) {
    const std::size_t n_ib = is_binning(config) ? config.ib.size() : 1;
    return (((a * config.weight_decays.size() + w) * n_ib + ib) * n_ds + d) * n_seed + g;
  };
  std::map<std::size_t, std::vector<double>> jensen_by_algo;  // key: cell index with d = 0
  std::map<AlgoKey, std::vector<double>> seed_avg;
  {
    std::vector<std::size_t> algos;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].ds == 0) algos.push_back(i);
    std::vector<std::vector<double>> jres(algos.size());
    parallel_for(algos.size(), config.jobs, [&](std::size_t j) {
      const Cell& c0 = cells[algos[j]];
      PosteriorSet ps;
      for (std::size_t d = 0; d < n_ds; ++d) {
        const auto& t = trained[cell_index(c0.arch, c0.wd, c0.ib, d, c0.seed)];
        if (t.model) ps.push_back({&t.model->swag});
      }
      if (ps.size() < 2) return;
      Rng rng = make_rng(config.master_seed, {kTagModelMi, 0, static_cast<std::uint64_t>(c0.arch),
                                              static_cast<std::uint64_t>(c0.wd), static_cast<std::uint64_t>(c0.ib),
                                              config.model_seeds[c0.seed]});
      ModelMiOptions opt;
      opt.k = config.model_k;
      jres[j] = estimate_model_mi_layers(ps, opt, rng);
    });
    for (std::size_t j = 0; j < algos.size(); ++j)
      if (!jres[j].empty()) jensen_by_algo[algos[j]] = jres[j];

    std::vector<AlgoKey> keys;
    for (const auto i : algos)
      if (cells[i].seed == 0) keys.push_back({cells[i].arch, cells[i].wd, cells[i].ib});
    std::vector<std::vector<double>> sres(keys.size());
    parallel_for(keys.size(), config.jobs, [&](std::size_t j) {
      const AlgoKey& k = keys[j];
      // Seeds whose models exist for every dataset draw; draws lacking any kept seed are dropped.
      std::vector<std::size_t> seeds;
      for (std::size_t g = 0; g < n_seed; ++g) {
        bool all = true;
        for (std::size_t d = 0; d < n_ds; ++d) all = all && trained[cell_index(k.arch, k.wd, k.ib, d, g)].model;
        if (all) seeds.push_back(g);
      }
      if (seeds.empty()) return;
      PosteriorSet ps(n_ds);
      for (std::size_t d = 0; d < n_ds; ++d)
        for (const auto g : seeds) ps[d].push_back(&trained[cell_index(k.arch, k.wd, k.ib, d, g)].model->swag);
      Rng rng = make_rng(config.master_seed, {kTagModelMi, 1, static_cast<std::uint64_t>(k.arch),
                                              static_cast<std::uint64_t>(k.wd), static_cast<std::uint64_t>(k.ib)});
      ModelMiOptions opt;
      opt.k = config.model_k;
      opt.variant = ModelMiVariant::seed_averaged;
      sres[j] = estimate_model_mi_layers(ps, opt, rng);
    });
    for (std::size_t j = 0; j < keys.size(); ++j)
      if (!sres[j].empty()) seed_avg[keys[j]] = sres[j];
  }
  say("model MI done");

  // Phase 3: one row per (cell, eval size); feature MI for accepted rows.
  const std::size_t n_eval = is_binning(config) ? 1 : config.eval_sizes.size();
  std::vector<std::map<int, LabeledSample>> eval_samples(n_ds);
  for (std::size_t d = 0; d < n_ds; ++d)
    for (std::size_t e = 0; e < n_eval; ++e) {
      const int size = is_binning(config) ? 0 : config.eval_sizes[e];
      eval_samples[d][size] = size == 0 ? datasets[d].train() : eval_sample(config, d, size);
    }

  res.runs.resize(cells.size() * n_eval);
  done = 0;
  parallel_for(res.runs.size(), config.jobs, [&](std::size_t ri) {
    const std::size_t ci = ri / n_eval, e = ri % n_eval;
    const Cell& cell = cells[ci];
    RunRecord& r = res.runs[ri];
    r.id = run_id(config, cell, e);
    r.group = group_name(config, cell, e);
    r.widths = config.architectures[cell.arch];
    r.weight_decay = config.weight_decays[cell.wd];
    r.dataset_seed = config.dataset_seeds[cell.ds];
    r.model_seed = config.model_seeds[cell.seed];
    r.eval_size = is_binning(config) ? 0 : config.eval_sizes[e];
    r.ib = is_binning(config) && config.ib[cell.ib];
    const Trained& t = trained[ci];
    if (!t.model) {
      r.status = "diverged";
      r.error = t.error;
      return;
    }
    const TrainedModel& m = *t.model;
    r.status = m.accepted ? "accepted" : "rejected";
    r.train_loss = m.train.loss;
    r.train_error = m.train.error;
    r.test_loss = m.test.loss;
    r.test_error = m.test.error;
    r.gap_loss = m.gap_loss;
    r.gap_error = m.gap_error;
    r.final_mi = m.final_mi;
    r.final_lambda = m.lambda_history.empty() ? 0.0 : m.lambda_history.back();
    const Baselines b = compute_baselines(m.params);
    r.scalars[metric::num_params] = b.num_params;
    r.scalars[metric::m_log_m] = b.m_log_m;
    r.scalars[metric::sum_frobenius] = b.sum_frobenius;
    r.scalars[metric::prod_frobenius] = b.prod_frobenius;
    if (!m.accepted) return;

    feature_metrics(config, cell, e, m.params, eval_samples[cell.ds].at(r.eval_size), r);
    const auto D = static_cast<std::size_t>(m.params.shape.depth());
    const auto jt = jensen_by_algo.find(cell_index(cell.arch, cell.wd, cell.ib, 0, cell.seed));
    const auto st = seed_avg.find(AlgoKey{cell.arch, cell.wd, cell.ib});
    if (jt != jensen_by_algo.end()) {
      r.series[metric::model_jensen].assign(jt->second.begin(), jt->second.begin() + static_cast<long>(D));
      r.scalars[metric::model_jensen_full] = jt->second.at(D);
    }
    if (st != seed_avg.end()) {
      r.series[metric::model_seed_avg].assign(st->second.begin(), st->second.begin() + static_cast<long>(D));
      r.scalars[metric::model_seed_avg_full] = st->second.at(D);
    }
    r.complete = jt != jensen_by_algo.end() && st != seed_avg.end();
    say("evaluated " + std::to_string(++done) + "/" + std::to_string(res.runs.size()) + " " + r.id);
  });

  // Phase 4: rescale within each group, tabulate, correlate.
  const auto combos = suite_combinations(config.kind);
  for (const auto& group : suite_groups(config)) {
    std::vector<RunRecord*> members;
    for (auto& r : res.runs)
      if (r.group == group && r.complete) members.push_back(&r);
    if (members.empty()) continue;
    const std::size_t L = members.front()->series.at(metric::model_jensen).size();
    for (auto* r : members) r->series[metric::model_rescaled].assign(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<double> model, feature;
      for (const auto* r : members) {
        model.push_back(r->series.at(metric::model_jensen)[l]);
        feature.push_back(r->series.at(metric::feature_mc_cond)[l]);
      }
      std::vector<double> scaled;
      try {
        scaled = rescale_model_mi(model, feature);
      } catch (const RescaleUndefined&) {
        // Only an empty parameter slice (l = 1) gives an all-zero column; zero scaled is zero.
        scaled.assign(model.size(), 0.0);
      }
      for (std::size_t i = 0; i < members.size(); ++i) members[i]->series[metric::model_rescaled][l] = scaled[i];
    }
    std::vector<ModelMetrics> mm;
    for (const auto* r : members) mm.push_back({r->id, r->gap_loss, r->gap_error, r->scalars, r->series});
    MetricTable table = build_metric_table(mm, combos);
    auto rows = correlate_table(table, group);
    res.correlations.insert(res.correlations.end(), rows.begin(), rows.end());
    res.tables.emplace(group, std::move(table));
  }
  return res;
}

std::string run_json(const RunRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["group"] = r.group;
  j["widths"] = r.widths;
  j["weight_decay"] = r.weight_decay;
  j["dataset_seed"] = r.dataset_seed;
  j["model_seed"] = r.model_seed;
  j["eval_size"] = r.eval_size;
  j["ib"] = r.ib;
  j["status"] = r.status;
  if (!r.error.empty()) j["error"] = r.error;
  j["train"] = {{"loss", r.train_loss}, {"error", r.train_error}};
  j["test"] = {{"loss", r.test_loss}, {"error", r.test_error}};
  j["gap_loss"] = r.gap_loss;
  j["gap_error"] = r.gap_error;
  j["final_mi"] = r.final_mi;
  j["final_lambda"] = r.final_lambda;
  j["complete"] = r.complete;
  j["sigma"] = r.sigma;
  j["series"] = r.series;
  j["scalars"] = r.scalars;
  return j.dump();
}

void write_suite_outputs(const SuiteResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
  };
  auto check = [&](std::ofstream& os, const char* name) {
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + (dir / name).string());
  };
  {
    auto os = open("config.ini");
    write_suite_config(os, result.config);
    check(os, "config.ini");
  }
  if (result.config.kind == SuiteKind::bounds_verify) {
    auto os = open("verdicts.jsonl");
    for (const auto& v : result.verdicts) os << verdict_json(v) << "\n";
    check(os, "verdicts.jsonl");
    return;
  }
  {
    auto os = open("runs.jsonl");
    for (const auto& r : result.runs) os << run_json(r) << "\n";
    check(os, "runs.jsonl");
  }
  {
    // All groups in one long table; model ids are unique across groups.
    MetricTable merged;
    for (const auto& group : suite_groups(result.config)) {
      const auto it = result.tables.find(group);
      if (it == result.tables.end()) continue;
      const MetricTable& t = it->second;
      for (std::size_t m = 0; m < t.model_ids.size(); ++m) {
        const std::size_t k = merged.add_model(t.model_ids[m], t.gap_loss[m], t.gap_error[m]);
        for (std::size_t c = 0; c < t.metric_names.size(); ++c)
          if (!std::isnan(t.values[c][m])) merged.set(t.metric_names[c], k, t.values[c][m]);
      }
    }
    auto os = open("metrics.csv");
    write_metrics_csv(os, merged);
    check(os, "metrics.csv");
  }
  {
    auto os = open("correlations.csv");
    write_correlations_csv(os, result.correlations);
    check(os, "correlations.csv");
  }
  {
    // Best metric by Pearson against the loss gap in the last group (the large sample).
    const auto groups = suite_groups(result.config);
    const CorrelationRow* best = nullptr;
    std::string group;
    for (auto g = groups.rbegin(); g != groups.rend() && !best; ++g)
      for (const auto& row : result.correlations)
        if (row.group == *g && row.gap_kind == "loss" && row.pearson && (!best || *row.pearson > *best->pearson)) {
          best = &row;
          group = *g;
        }
    auto os = open("scatter.svg");
    if (best) {
      const MetricTable& t = result.tables.at(group);
      const auto& col = t.column(best->metric);
      std::vector<double> xs, ys;
      for (std::size_t m = 0; m < t.model_ids.size(); ++m)
        if (std::isfinite(col[m])) {
          xs.push_back(col[m]);
          ys.push_back(t.gap_loss[m]);
        }
      write_scatter_svg(os, xs, ys, best->metric + " (" + group + ")", best->metric, "generalization gap (loss)");
    } else {
      os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"10\" height=\"10\"/>\n";
    }
    check(os, "scatter.svg");
  }
}

}  // namespace ibgb
