#pragma once
// Monte-Carlo harness: JSON configuration, seeded drops run on a worker pool,
// the user/distance sweeps, the scheme benchmark, and CSV/gnuplot output.
//
// Drop i of every grid point uses seed derive_seed(master, i), so grid points
// and schemes are compared on paired drops, and results do not depend on the
// number of workers.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "risfd/baselines.hpp"
#include "risfd/channel.hpp"
#include "risfd/fris.hpp"

namespace risfd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UserPair {
  std::size_t m = 4;
  std::size_t n = 4;
};

struct SweepConfig {
  std::vector<std::size_t> m_values{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<std::size_t> n_values{1, 2, 3, 4, 5, 6, 7, 8};
  std::size_t fixed_users = 4;  // N while sweeping M, and M while sweeping N
  std::vector<double> gamma_u_db{5.0, 10.0};
  std::vector<double> d_values{40, 50, 60, 70, 80, 90, 100, 110, 120};
  std::vector<std::size_t> k_values{8, 16, 32};
  double distance_gamma_u_db = 5.0;
  std::vector<UserPair> benchmark_users{{4, 2}, {4, 4}, {4, 6}, {4, 8}};
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int drops = 10;
  ScenarioGeometry geometry;
  RicianParams channel;
  Sizes sizes;
  PowerConfig power;
  FrisConfig fris;
  SweepConfig sweep;

  void validate() const;  // throws ConfigError
};

// Unknown keys, wrong types and invalid values raise ConfigError.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);
// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// Worker count: explicit value if > 0, else RIS_FD_OPT_WORKERS, else the
// hardware concurrency.
int resolve_workers(int requested);

// Runs fn(i) for i in [0, count) on `workers` threads. Exceptions are
// rethrown after all workers stop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

std::uint64_t drop_seed(std::uint64_t master, std::size_t drop);

struct DropOutcome {
  std::size_t drop = 0;
  std::uint64_t seed = 0;
  FrisResult result;
  double wall_ms = 0.0;

  bool feasible() const { return result.status != FrisStatus::Infeasible; }
  // Outage accounting: infeasible drops contribute zero rate.
  double dl_sum() const { return feasible() ? result.rates.dl_sum() : 0.0; }
  double ul_rate() const { return feasible() ? result.rates.ul_rate : 0.0; }
};

DropOutcome run_drop(const ExperimentConfig& cfg, std::size_t drop);
std::vector<DropOutcome> run_drops(const ExperimentConfig& cfg, int workers);

struct SweepPoint {
  std::string sweep;  // "m", "n" or "d"
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double d = 0.0;
  double gamma_u_db = 0.0;
  RVector dl;  // per drop, zero for infeasible drops
  RVector ul;
  std::vector<int> feasible;  // per drop
};

std::vector<SweepPoint> sweep_users(const ExperimentConfig& cfg, int workers);
std::vector<SweepPoint> sweep_distance(const ExperimentConfig& cfg, int workers);

struct BenchmarkDrop {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t drop = 0;
  bool feasible = false;  // FRIS start point satisfied the UL QoS
  double fris = 0.0;
  double fd_no_ris = 0.0;
  double random_ris = 0.0;
  double hd_ris_mrc = 0.0;
  double hd_no_ris = 0.0;
};

inline const std::vector<std::string>& benchmark_schemes() {
  static const std::vector<std::string> names{"fris", "fd_no_ris", "random_ris", "hd_ris_mrc",
                                              "hd_no_ris"};
  return names;
}
double scheme_value(const BenchmarkDrop& b, const std::string& scheme);

std::vector<BenchmarkDrop> run_benchmark(const ExperimentConfig& cfg, int workers);

// Statistics used by the sweeps and the acceptance checks.
double mean(std::span<const double> v);
double standard_error(std::span<const double> v);
// One-sided sign test: P(X >= wins) for X ~ Binomial(wins + losses, 1/2).
double sign_test_p(int wins, int losses);

// Output writers; each returns the written path.
std::filesystem::path write_run_csv(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                                    const std::vector<DropOutcome>& drops);
std::filesystem::path write_run_json(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                                     const std::vector<DropOutcome>& drops);
std::filesystem::path write_sweep_csv(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                                      const std::vector<SweepPoint>& points);
std::filesystem::path write_benchmark_csv(const std::filesystem::path& dir,
                                          const ExperimentConfig& cfg,
                                          const std::vector<BenchmarkDrop>& drops);
std::filesystem::path write_plot_script(const std::filesystem::path& dir, int figure);

}  // namespace risfd
