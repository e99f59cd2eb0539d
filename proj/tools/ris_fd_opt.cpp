// Command-line front end: run, sweep-users, sweep-distance, benchmark, selftest.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "risfd/experiment.hpp"
#include "risfd/selftest.hpp"

namespace fs = std::filesystem;
using namespace risfd;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  int workers = 0;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON configuration file (defaults when omitted)");
  cmd->add_option("--seed", c.seed, "master seed, overrides the config");
  cmd->add_option("--drops", c.drops, "number of drops, overrides the config")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", c.workers,
                  "worker threads (default: RIS_FD_OPT_WORKERS, else all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c.out, "output directory");
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.drops) cfg.drops = *c.drops;
  cfg.validate();
  return cfg;
}

void report(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint beamforming for RIS-assisted full-duplex links"};
  app.require_subcommand(1);

  Common run_opts, users_opts, dist_opts, bench_opts;
  auto* run = app.add_subcommand("run", "optimize a batch of drops");
  add_common(run, run_opts);
  auto* users = app.add_subcommand("sweep-users", "DL/UL rate versus the number of UEs");
  add_common(users, users_opts);
  auto* dist = app.add_subcommand("sweep-distance", "DL rate versus BS-RIS distance and K");
  add_common(dist, dist_opts);
  auto* bench = app.add_subcommand("benchmark", "compare against the reference schemes");
  add_common(bench, bench_opts);

  auto* self = app.add_subcommand("selftest", "run the invariant suite");
  std::string fault = "none";
  std::uint64_t self_seed = 1;
  self->add_option("--inject-fault", fault, "deliberately break a component")
      ->check(CLI::IsMember({"none", "omega-sign"}));
  self->add_option("--seed", self_seed, "seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*self) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto checks =
          run_selftest(fault == "omega-sign" ? Fault::OmegaSign : Fault::None, self_seed);
      print_selftest(checks, std::cout);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf("%s in %.2f s\n", all_passed(checks) ? "all checks passed" : "FAILED", secs);
      return all_passed(checks) ? 0 : 1;
    }

    if (*run) {
      const ExperimentConfig cfg = load(run_opts);
      const auto drops = run_drops(cfg, resolve_workers(run_opts.workers));
      int infeasible = 0;
      for (const auto& d : drops) infeasible += d.feasible() ? 0 : 1;
      report(write_run_csv(run_opts.out, cfg, drops));
      report(write_run_json(run_opts.out, cfg, drops));
      std::cout << drops.size() << " drops, " << infeasible << " infeasible\n";
      return 0;
    }
    if (*users) {
      const ExperimentConfig cfg = load(users_opts);
      const auto pts = sweep_users(cfg, resolve_workers(users_opts.workers));
      report(write_sweep_csv(users_opts.out, cfg, pts));
      report(write_plot_script(users_opts.out, 2));
      return 0;
    }
    if (*dist) {
      const ExperimentConfig cfg = load(dist_opts);
      const auto pts = sweep_distance(cfg, resolve_workers(dist_opts.workers));
      report(write_sweep_csv(dist_opts.out, cfg, pts));
      report(write_plot_script(dist_opts.out, 3));
      return 0;
    }
    if (*bench) {
      const ExperimentConfig cfg = load(bench_opts);
      const auto rows = run_benchmark(cfg, resolve_workers(bench_opts.workers));
      report(write_benchmark_csv(bench_opts.out, cfg, rows));
      report(write_plot_script(bench_opts.out, 4));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
