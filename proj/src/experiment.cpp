#include "risfd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace risfd {
namespace {

using nlohmann::json;

// Reads one JSON object, tracking which keys were consumed so that typos are
// reported instead of silently ignored.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(where_ + ": " + what);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void number(const std::string& key, double& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) fail("'" + key + "' must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail("'" + key + "' must be finite");
  }

  void count(const std::string& key, std::size_t& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      fail("'" + key + "' must be a non-negative integer");
    out = v.get<std::size_t>();
  }

  void integer(const std::string& key, int& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
    out = v.get<int>();
  }

  void u64(const std::string& key, std::uint64_t& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail("'" + key + "' must be a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void boolean(const std::string& key, bool& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail("'" + key + "' must be true or false");
    out = v.get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    if (!take(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_string()) fail("'" + key + "' must be a string");
    return v.get<std::string>();
  }

  template <class T, class F>
  void list(const std::string& key, std::vector<T>& out, F convert) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) fail("'" + key + "' must be a non-empty array");
    out.clear();
    for (const auto& e : v) out.push_back(convert(e));
  }

  // A power given either in watts (<base>_w) or in dBm (<base>_dbm).
  void power(const std::string& base, double& out) {
    const bool w = has(base + "_w");
    const bool dbm = has(base + "_dbm");
    if (w && dbm) fail("give only one of '" + base + "_w' and '" + base + "_dbm'");
    if (w) number(base + "_w", out);
    if (dbm) {
      double v = 0.0;
      number(base + "_dbm", v);
      out = std::pow(10.0, (v - 30.0) / 10.0);
    }
  }

  std::optional<Reader> object(const std::string& key) {
    if (!take(key)) return std::nullopt;
    return Reader(j_.at(key), where_ + "." + key);
  }

  // Null means "unset".
  void optional_number(const std::string& key, std::optional<double>& out) {
    if (!take(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    double v = 0.0;
    number(key, v);
    out = v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) fail("unknown key '" + it.key() + "'");
  }

 private:
  bool take(const std::string& key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

double as_number(const json& e) {
  if (!e.is_number()) throw ConfigError("sweep: list entries must be numbers");
  return e.get<double>();
}

std::size_t as_count(const json& e) {
  if (!e.is_number_integer() || e.get<long long>() < 1)
    throw ConfigError("sweep: list entries must be positive integers");
  return e.get<std::size_t>();
}

UserPair as_pair(const json& e) {
  if (!e.is_array() || e.size() != 2)
    throw ConfigError("sweep.benchmark_users: entries must be [M, N] pairs");
  return {as_count(e[0]), as_count(e[1])};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// The drop seed keys the placement, the channels and the random initial
// phases, so two runs that share it see the same network.
ChannelSet drop_channels(const ExperimentConfig& cfg, const Sizes& sizes, std::uint64_t seed) {
  return generate_drop(cfg.geometry, sizes, cfg.channel, seed);
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    if (drops < 1) throw ConfigError("drops must be at least 1");
    geometry.validate();
    channel.validate();
    sizes.validate();
    power.validate();
    fris.validate();
    if (sweep.m_values.empty() || sweep.n_values.empty() || sweep.gamma_u_db.empty() ||
        sweep.d_values.empty() || sweep.k_values.empty() || sweep.benchmark_users.empty())
      throw ConfigError("sweep lists must be non-empty");
    if (sweep.fixed_users < 1) throw ConfigError("sweep.fixed_users must be at least 1");
    for (double d : sweep.d_values)
      if (!(d > 0.0)) throw ConfigError("sweep.d_values_m must be positive");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Reader root(j, "config");
  root.u64("seed", cfg.seed);
  root.integer("drops", cfg.drops);

  if (auto g = root.object("geometry")) {
    g->number("d_m", cfg.geometry.d);
    g->number("d_h_m", cfg.geometry.d_h);
    g->number("d_v_m", cfg.geometry.d_v);
    g->number("user_radius_m", cfg.geometry.user_radius);
    g->finish();
  }
  if (auto c = root.object("channel")) {
    c->number("rician_factor", cfg.channel.rho);
    c->number("pathloss_intercept_db", cfg.channel.pl_intercept_db);
    c->number("pathloss_slope_db_per_decade", cfg.channel.pl_slope_db);
    c->number("si_isolation_db", cfg.channel.si_isolation_db);
    c->number("min_distance_m", cfg.channel.min_distance);
    c->number("ris_amplitude", cfg.channel.beta);
    if (auto conv = c->string("pathloss_convention")) {
      if (*conv == "attenuation")
        cfg.channel.convention = PathlossConvention::Attenuation;
      else if (*conv == "as_printed")
        cfg.channel.convention = PathlossConvention::AsPrinted;
      else
        c->fail("pathloss_convention must be \"attenuation\" or \"as_printed\"");
    }
    c->finish();
  }
  cfg.fris.beta = cfg.channel.beta;
  if (auto s = root.object("sizes")) {
    s->count("n_t", cfg.sizes.n_t);
    s->count("n_r", cfg.sizes.n_r);
    s->count("k", cfg.sizes.k);
    s->count("m", cfg.sizes.m);
    s->count("n", cfg.sizes.n);
    s->finish();
  }
  if (auto p = root.object("power")) {
    p->power("p_max", cfg.power.p_max);
    p->power("p_d", cfg.power.p_d);
    p->power("p_u", cfg.power.p_u);
    p->power("sigma2", cfg.power.sigma2);
    p->power("sigma2_u", cfg.power.sigma2_u);
    p->finish();
  }
  if (auto a = root.object("algorithm")) {
    FrisConfig& f = cfg.fris;
    a->number("gamma_u_db", f.gamma_u_db);
    a->optional_number("t_th_u_bps_hz", f.t_th_u);
    a->number("rho", f.rho);
    a->integer("max_outer", f.max_outer);
    a->number("collapse_drop", f.collapse_drop);
    a->boolean("optimize_phases", f.optimize_phases);
    a->number("rho_w", f.bs.rho_w);
    a->integer("max_bs_iter", f.bs.max_iter);
    if (auto mode = a->string("ul_constraint_mode")) {
      if (*mode == "sca")
        f.bs.mode = UlConstraintMode::Sca;
      else if (*mode == "direct")
        f.bs.mode = UlConstraintMode::Direct;
      else
        a->fail("ul_constraint_mode must be \"sca\" or \"direct\"");
    }
    a->number("rho_theta", f.ris.rho_theta);
    a->integer("max_ris_iter", f.ris.max_iter);
    a->number("kappa", f.ris.kappa);
    a->number("lambda0", f.ris.lambda0);
    a->number("lambda_max", f.ris.lambda_max);
    a->number("slack_tol", f.ris.slack_tol);
    a->finish();
  }
  if (auto s = root.object("sweep")) {
    SweepConfig& w = cfg.sweep;
    s->list("m_values", w.m_values, as_count);
    s->list("n_values", w.n_values, as_count);
    s->count("fixed_users", w.fixed_users);
    s->list("gamma_u_db_values", w.gamma_u_db, as_number);
    s->list("d_values_m", w.d_values, as_number);
    s->list("k_values", w.k_values, as_count);
    s->number("distance_gamma_u_db", w.distance_gamma_u_db);
    s->list("benchmark_users", w.benchmark_users, as_pair);
    s->finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["drops"] = cfg.drops;
  j["geometry"] = {{"d_m", cfg.geometry.d},
                   {"d_h_m", cfg.geometry.d_h},
                   {"d_v_m", cfg.geometry.d_v},
                   {"user_radius_m", cfg.geometry.user_radius}};
  j["channel"] = {
      {"rician_factor", cfg.channel.rho},
      {"pathloss_intercept_db", cfg.channel.pl_intercept_db},
      {"pathloss_slope_db_per_decade", cfg.channel.pl_slope_db},
      {"si_isolation_db", cfg.channel.si_isolation_db},
      {"min_distance_m", cfg.channel.min_distance},
      {"ris_amplitude", cfg.channel.beta},
      {"pathloss_convention",
       cfg.channel.convention == PathlossConvention::Attenuation ? "attenuation" : "as_printed"}};
  j["sizes"] = {{"n_t", cfg.sizes.n_t},
                {"n_r", cfg.sizes.n_r},
                {"k", cfg.sizes.k},
                {"m", cfg.sizes.m},
                {"n", cfg.sizes.n}};
  j["power"] = {{"p_max_w", cfg.power.p_max},
                {"p_d_w", cfg.power.p_d},
                {"p_u_w", cfg.power.p_u},
                {"sigma2_w", cfg.power.sigma2},
                {"sigma2_u_w", cfg.power.sigma2_u}};
  const FrisConfig& f = cfg.fris;
  j["algorithm"] = {{"gamma_u_db", f.gamma_u_db},
                    {"t_th_u_bps_hz", f.t_th_u ? json(*f.t_th_u) : json(nullptr)},
                    {"rho", f.rho},
                    {"max_outer", f.max_outer},
                    {"collapse_drop", f.collapse_drop},
                    {"optimize_phases", f.optimize_phases},
                    {"rho_w", f.bs.rho_w},
                    {"max_bs_iter", f.bs.max_iter},
                    {"ul_constraint_mode", f.bs.mode == UlConstraintMode::Sca ? "sca" : "direct"},
                    {"rho_theta", f.ris.rho_theta},
                    {"max_ris_iter", f.ris.max_iter},
                    {"kappa", f.ris.kappa},
                    {"lambda0", f.ris.lambda0},
                    {"lambda_max", f.ris.lambda_max},
                    {"slack_tol", f.ris.slack_tol}};
  json users = json::array();
  for (const auto& p : cfg.sweep.benchmark_users) users.push_back({p.m, p.n});
  j["sweep"] = {{"m_values", cfg.sweep.m_values},
                {"n_values", cfg.sweep.n_values},
                {"fixed_users", cfg.sweep.fixed_users},
                {"gamma_u_db_values", cfg.sweep.gamma_u_db},
                {"d_values_m", cfg.sweep.d_values},
                {"k_values", cfg.sweep.k_values},
                {"distance_gamma_u_db", cfg.sweep.distance_gamma_u_db},
                {"benchmark_users", users}};
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = json::parse(config_to_json(cfg)).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RIS_FD_OPT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t n_threads =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || stop.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t drop_seed(std::uint64_t master, std::size_t drop) {
  return derive_seed(master, 0xd409'0000ULL + drop);
}

DropOutcome run_drop(const ExperimentConfig& cfg, std::size_t drop) {
  DropOutcome out;
  out.drop = drop;
  out.seed = drop_seed(cfg.seed, drop);
  const auto t0 = std::chrono::steady_clock::now();
  const ChannelSet ch = drop_channels(cfg, cfg.sizes, out.seed);
  out.result = run_fris(ch, cfg.power, cfg.fris, out.seed);
  out.wall_ms = ms_since(t0);
  return out;
}

std::vector<DropOutcome> run_drops(const ExperimentConfig& cfg, int workers) {
  std::vector<DropOutcome> out(static_cast<std::size_t>(cfg.drops));
  parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = run_drop(cfg, i); });
  return out;
}

namespace {

struct GridPoint {
  SweepPoint meta;
  Sizes sizes;
  ScenarioGeometry geometry;
};

std::vector<SweepPoint> run_grid(const ExperimentConfig& cfg, std::vector<GridPoint> grid,
                                 int workers) {
  const auto drops = static_cast<std::size_t>(cfg.drops);
  for (auto& g : grid) {
    g.meta.dl.assign(drops, 0.0);
    g.meta.ul.assign(drops, 0.0);
    g.meta.feasible.assign(drops, 0);
  }
  parallel_for(grid.size() * drops, workers, [&](std::size_t item) {
    GridPoint& g = grid[item / drops];
    const std::size_t drop = item % drops;
    const std::uint64_t seed = drop_seed(cfg.seed, drop);
    const ChannelSet ch = generate_drop(g.geometry, g.sizes, cfg.channel, seed);
    FrisConfig fc = cfg.fris;
    fc.t_th_u.reset();
    fc.gamma_u_db = g.meta.gamma_u_db;
    DropOutcome o;
    o.result = run_fris(ch, cfg.power, fc, seed);
    g.meta.dl[drop] = o.dl_sum();
    g.meta.ul[drop] = o.ul_rate();
    g.meta.feasible[drop] = o.feasible() ? 1 : 0;
  });
  std::vector<SweepPoint> out;
  for (auto& g : grid) out.push_back(std::move(g.meta));
  return out;
}

}  // namespace

std::vector<SweepPoint> sweep_users(const ExperimentConfig& cfg, int workers) {
  std::vector<GridPoint> grid;
  for (double gamma : cfg.sweep.gamma_u_db) {
    auto add = [&](const char* which, std::size_t m, std::size_t n) {
      GridPoint g;
      g.sizes = cfg.sizes;
      g.sizes.m = m;
      g.sizes.n = n;
      g.geometry = cfg.geometry;
      g.meta.sweep = which;
      g.meta.m = m;
      g.meta.n = n;
      g.meta.k = g.sizes.k;
      g.meta.d = cfg.geometry.d;
      g.meta.gamma_u_db = gamma;
      grid.push_back(std::move(g));
    };
    for (std::size_t m : cfg.sweep.m_values) add("m", m, cfg.sweep.fixed_users);
    for (std::size_t n : cfg.sweep.n_values) add("n", cfg.sweep.fixed_users, n);
  }
  return run_grid(cfg, std::move(grid), workers);
}

std::vector<SweepPoint> sweep_distance(const ExperimentConfig& cfg, int workers) {
  std::vector<GridPoint> grid;
  for (std::size_t k : cfg.sweep.k_values) {
    for (double d : cfg.sweep.d_values) {
      GridPoint g;
      g.sizes = cfg.sizes;
      g.sizes.k = k;
      g.geometry = cfg.geometry;
      g.geometry.d = d;
      g.meta.sweep = "d";
      g.meta.m = g.sizes.m;
      g.meta.n = g.sizes.n;
      g.meta.k = k;
      g.meta.d = d;
      g.meta.gamma_u_db = cfg.sweep.distance_gamma_u_db;
      grid.push_back(std::move(g));
    }
  }
  return run_grid(cfg, std::move(grid), workers);
}

double scheme_value(const BenchmarkDrop& b, const std::string& scheme) {
  if (scheme == "fris") return b.fris;
  if (scheme == "fd_no_ris") return b.fd_no_ris;
  if (scheme == "random_ris") return b.random_ris;
  if (scheme == "hd_ris_mrc") return b.hd_ris_mrc;
  if (scheme == "hd_no_ris") return b.hd_no_ris;
  throw std::invalid_argument("unknown scheme '" + scheme + "'");
}

std::vector<BenchmarkDrop> run_benchmark(const ExperimentConfig& cfg, int workers) {
  const auto drops = static_cast<std::size_t>(cfg.drops);
  const auto& users = cfg.sweep.benchmark_users;
  std::vector<BenchmarkDrop> out(users.size() * drops);
  parallel_for(out.size(), workers, [&](std::size_t item) {
    const UserPair up = users[item / drops];
    BenchmarkDrop& b = out[item];
    b.m = up.m;
    b.n = up.n;
    b.drop = item % drops;
    Sizes sizes = cfg.sizes;
    sizes.m = up.m;
    sizes.n = up.n;
    const std::uint64_t seed = drop_seed(cfg.seed, b.drop);
    const ChannelSet ch = drop_channels(cfg, sizes, seed);

    // Full-duplex schemes in outage (QoS unattainable) score zero.
    auto fd = [](const FrisResult& r) {
      return r.status == FrisStatus::Infeasible ? 0.0 : fd_sum_rate(r.rates);
    };
    const FrisResult fr = run_fris(ch, cfg.power, cfg.fris, seed);
    b.feasible = fr.status != FrisStatus::Infeasible;
    b.fris = fd(fr);
    b.fd_no_ris = fd(fd_no_ris(ch, cfg.power, cfg.fris, seed));
    b.random_ris = fd(random_phase_ris(ch, cfg.power, cfg.fris, seed));
    b.hd_ris_mrc = hd_rates(ch, mrc_ris_phases(ch, cfg.fris.beta), cfg.power).sum_rate;
    b.hd_no_ris = hd_rates(ch.without_ris(), RisPhase{{}, cfg.fris.beta}, cfg.power).sum_rate;
  });
  return out;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double sign_test_p(int wins, int losses) {
  const int n = wins + losses;
  if (n <= 0) return 1.0;
  double p = 0.0;
  for (int i = wins; i <= n; ++i)
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                  n * std::log(2.0));
  return std::min(p, 1.0);
}

std::filesystem::path write_run_csv(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                                    const std::vector<DropOutcome>& drops) {
  const auto path = dir / "results.csv";
  auto os = open_out(path);
  const std::string hash = config_hash(cfg);
  os << "drop,seed,config_hash,status,feasible";
  for (std::size_t i = 0; i < cfg.sizes.m; ++i) os << ",dl_rate_" << i;
  for (std::size_t i = 0; i < cfg.sizes.n; ++i) os << ",ul_rate_" << i;
  os << ",dl_sum,ul_aggregate,ul_ue_sum,ul_sinr,initial_dl_sum,power,outer_iterations,collapse,"
        "wall_ms\n";
  std::vector<const DropOutcome*> sorted;
  for (const auto& d : drops) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(),
            [](const DropOutcome* a, const DropOutcome* b) { return a->drop < b->drop; });
  for (const DropOutcome* d : sorted) {
    const FrisResult& r = d->result;
    os << d->drop << ',' << d->seed << ',' << hash << ',' << fris_status_name(r.status) << ','
       << (d->feasible() ? 1 : 0);
    for (double v : r.rates.dl_rate) os << ',' << fmt(v);
    for (double v : r.rates.ul_ue_rate) os << ',' << fmt(v);
    os << ',' << fmt(r.rates.dl_sum()) << ',' << fmt(r.rates.ul_rate) << ','
       << fmt(r.rates.ul_ue_sum()) << ',' << fmt(r.rates.ul_sinr) << ',' << fmt(r.initial_dl_sum)
       << ',' << fmt(r.w.power()) << ',' << r.outer_iterations() << ',' << (r.collapse ? 1 : 0)
       << ',' << fmt(d->wall_ms) << '\n';
  }
  return path;
}

std::filesystem::path write_run_json(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                                     const std::vector<DropOutcome>& drops) {
  const auto path = dir / "result.json";
  json j;
  j["config"] = json::parse(config_to_json(cfg));
  j["config_hash"] = config_hash(cfg);
  json arr = json::array();
  for (const auto& d : drops)
    arr.push_back({{"drop", d.drop},
                   {"seed", d.seed},
                   {"wall_ms", d.wall_ms},
                   {"result", json::parse(d.result.to_json())}});
  j["drops"] = std::move(arr);
  auto os = open_out(path);
  os << j.dump(2) << '\n';
  return path;
}

std::filesystem::path write_sweep_csv(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                                      const std::vector<SweepPoint>& points) {
  const auto path = dir / "results.csv";
  auto os = open_out(path);
  const std::string hash = config_hash(cfg);
  os << "sweep,m,n,k,d_m,gamma_u_db,drops,feasible_drops,mean_dl_sum,se_dl_sum,mean_ul,se_ul,"
        "config_hash\n";
  for (const auto& p : points) {
    int feasible = 0;
    for (int f : p.feasible) feasible += f;
    os << p.sweep << ',' << p.m << ',' << p.n << ',' << p.k << ',' << fmt(p.d) << ','
       << fmt(p.gamma_u_db) << ',' << p.dl.size() << ',' << feasible << ',' << fmt(mean(p.dl))
       << ',' << fmt(standard_error(p.dl)) << ',' << fmt(mean(p.ul)) << ','
       << fmt(standard_error(p.ul)) << ',' << hash << '\n';
  }
  return path;
}

std::filesystem::path write_benchmark_csv(const std::filesystem::path& dir,
                                          const ExperimentConfig& cfg,
                                          const std::vector<BenchmarkDrop>& drops) {
  const std::string hash = config_hash(cfg);
  const auto& schemes = benchmark_schemes();
  {
    auto os = open_out(dir / "benchmark_drops.csv");
    os << "m,n,drop,seed,fris_feasible";
    for (const auto& s : schemes) os << ',' << s;
    os << ",config_hash\n";
    for (const auto& b : drops) {
      os << b.m << ',' << b.n << ',' << b.drop << ',' << drop_seed(cfg.seed, b.drop) << ','
         << (b.feasible ? 1 : 0);
      for (const auto& s : schemes) os << ',' << fmt(scheme_value(b, s));
      os << ',' << hash << '\n';
    }
  }

  const auto path = dir / "results.csv";
  auto os = open_out(path);
  auto imp = open_out(dir / "improvements.csv");
  os << "m,n,scheme,drops,mean_sum_rate,se_sum_rate,config_hash\n";
  imp << "m,n,scheme,reference,improvement_pct,wins,losses,sign_test_p,config_hash\n";
  for (const auto& up : cfg.sweep.benchmark_users) {
    std::vector<const BenchmarkDrop*> rows;
    for (const auto& b : drops)
      if (b.m == up.m && b.n == up.n) rows.push_back(&b);
    auto values = [&](const std::string& s) {
      RVector v;
      for (const auto* b : rows) v.push_back(scheme_value(*b, s));
      return v;
    };
    for (const auto& s : schemes) {
      const RVector v = values(s);
      os << up.m << ',' << up.n << ',' << s << ',' << v.size() << ',' << fmt(mean(v)) << ','
         << fmt(standard_error(v)) << ',' << hash << '\n';
    }
    for (const auto& a : schemes)
      for (const auto& b : schemes) {
        if (a == b) continue;
        const RVector va = values(a), vb = values(b);
        int wins = 0, losses = 0;
        for (std::size_t i = 0; i < va.size(); ++i) {
          if (va[i] > vb[i]) ++wins;
          if (va[i] < vb[i]) ++losses;
        }
        const double mb = mean(vb);
        const double pct = mb > 0.0 ? 100.0 * (mean(va) / mb - 1.0) : 0.0;
        imp << up.m << ',' << up.n << ',' << a << ',' << b << ',' << fmt(pct) << ',' << wins
            << ',' << losses << ',' << fmt(sign_test_p(wins, losses)) << ',' << hash << '\n';
      }
  }
  return path;
}

std::filesystem::path write_plot_script(const std::filesystem::path& dir, int figure) {
  const auto path = dir / ("fig" + std::to_string(figure) + ".gp");
  auto os = open_out(path);
  os << "set datafile separator ','\nset key top right\nset grid\n";
  switch (figure) {
    case 2:
      os << "set terminal pngcairo size 1000,420\nset output 'fig2.png'\n"
            "set multiplot layout 1,2\n"
            "set xlabel 'number of DL UEs (M)'\nset ylabel 'mean DL sum rate (bit/s/Hz)'\n"
            "plot for [g in '5 10'] 'results.csv' using "
            "(strcol(1) eq 'm' && $6 == g+0 ? $2 : 1/0):9:10 with yerrorlines "
            "title sprintf('gamma_U = %s dB', g)\n"
            "set xlabel 'number of UL UEs (N)'\nset ylabel 'mean UL rate (bit/s/Hz)'\n"
            "plot for [g in '5 10'] 'results.csv' using "
            "(strcol(1) eq 'n' && $6 == g+0 ? $3 : 1/0):11:12 with yerrorlines "
            "title sprintf('gamma_U = %s dB', g)\n"
            "unset multiplot\n";
      break;
    case 3:
      os << "set terminal pngcairo size 640,420\nset output 'fig3.png'\n"
            "set xlabel 'BS-RIS horizontal distance d (m)'\n"
            "set ylabel 'mean DL sum rate (bit/s/Hz)'\n"
            "plot for [k in '8 16 32'] 'results.csv' using "
            "($4 == k+0 ? $5 : 1/0):9:10 with yerrorlines title sprintf('K = %s', k)\n";
      break;
    case 4:
      os << "set terminal pngcairo size 640,420\nset output 'fig4.png'\n"
            "set xlabel 'N / M'\nset ylabel 'mean sum rate (bit/s/Hz)'\n"
            "plot for [s in 'fris fd_no_ris random_ris hd_ris_mrc hd_no_ris'] 'results.csv' "
            "using (strcol(3) eq s ? $2/$1 : 1/0):5:6 with yerrorlines title s\n";
      break;
    default:
      throw std::invalid_argument("no plot script for figure " + std::to_string(figure));
  }
  return path;
}

}  // namespace risfd
