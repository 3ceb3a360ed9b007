// Command-line entry point for experiment suites.
//
// Exit status: 0 on success (diverged models do not fail the run), 2 on a
// configuration error, 3 on an I/O error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ibgb/errors.hpp"
#include "ibgb/suite.hpp"

namespace {

void print_summary(const ibgb::SuiteResult& res) {
  using namespace ibgb;
  if (res.config.kind == SuiteKind::bounds_verify) {
    for (const auto& v : res.verdicts)
      std::printf("%-14s %-18s bound=%.4f max_gap=%.4f violation_rate=%.4f\n", v.instance_id.c_str(),
                  v.mode == BoundMode::thm1_fixed_encoder ? "thm1_fixed_encoder" : "thm2_learned", v.bound_value,
                  v.max_gap, v.violation_rate);
    return;
  }
  std::size_t accepted = 0, rejected = 0, diverged = 0;
  for (const auto& r : res.runs) {
    if (r.status == "accepted") ++accepted;
    if (r.status == "rejected") ++rejected;
    if (r.status == "diverged") ++diverged;
  }
  std::printf("model rows: %zu accepted, %zu rejected, %zu diverged\n", accepted, rejected, diverged);
  for (const auto& group : suite_groups(res.config)) {
    const CorrelationRow* best = nullptr;
    for (const auto& row : res.correlations)
      if (row.group == group && row.gap_kind == "loss" && row.pearson && (!best || *row.pearson > *best->pearson))
        best = &row;
    if (best) std::printf("%s: best Pearson vs loss gap %.4f (%s, n=%zu)\n", group.c_str(), *best->pearson,
                          best->metric.c_str(), best->n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run information-bottleneck generalization experiment suites"};
  std::string config_path, kind_name, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool smoke = false, quiet = false;
  auto* config_opt = app.add_option("--config", config_path, "Suite config file ([section] key = value)");
  app.add_option("--kind", kind_name, "constrained2d, unconstrained2d, binning2d or bounds_verify");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--jobs", jobs, "Worker threads (default: IBGB_JOBS, then the config value)")->check(CLI::PositiveNumber);
  app.add_flag("--smoke", smoke, "8-model grid for the chosen kind")->excludes(config_opt);
  app.add_flag("-q,--quiet", quiet, "No progress output");
  CLI11_PARSE(app, argc, argv);

  ibgb::SuiteConfig config;
  try {
    if (!config_path.empty()) {
      config = ibgb::load_suite_config(config_path);
      if (!kind_name.empty()) config.kind = ibgb::parse_suite_kind(kind_name);
    } else {
      const auto kind = kind_name.empty() ? ibgb::SuiteKind::constrained2d : ibgb::parse_suite_kind(kind_name);
      config = smoke ? ibgb::smoke_suite_config(kind) : ibgb::default_suite_config(kind);
    }
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed) config.master_seed = *seed;
    if (jobs) {
      config.jobs = *jobs;
    } else if (const char* env = std::getenv("IBGB_JOBS")) {
      try {
        config.jobs = std::stoi(env);
      } catch (const std::exception&) {
        throw ibgb::ConfigError(std::string("IBGB_JOBS is not an integer: ") + env);
      }
    }
    config.validate();
  } catch (const ibgb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ibgb::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  ibgb::SuiteResult result;
  try {
    result = ibgb::run_suite(config, quiet ? ibgb::SuiteLog{} : [](const std::string& m) { std::cerr << m << "\n"; });
  } catch (const ibgb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  try {
    ibgb::write_suite_outputs(result, config.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  }
  print_summary(result);
  std::cout << "wrote " << config.out_dir.string() << "\n";
  return 0;
}
