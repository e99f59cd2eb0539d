// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number, e.g. `acceptance 1 2 12`.

#include <algorithm>
#include <chrono>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "pg_oracle.hpp"
#include "risfd/baselines.hpp"
#include "risfd/bs_subproblem.hpp"
#include "risfd/experiment.hpp"
#include "risfd/qcqp.hpp"
#include "risfd/ris_subproblem.hpp"
#include "risfd/transforms.hpp"
#include "support.hpp"

using namespace risfd;
using namespace risfd::test;
namespace q = risfd::qcqp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// A drop at the default sizes with random beams and phases, powers in noise
// units.
struct Sample {
  ChannelSet ch;
  PowerConfig pw;
  Beamformer w;
  RisPhase th;
};

Sample sample(std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 0xacce));
  Sample s;
  s.ch = generate_drop(ScenarioGeometry{}, Sizes{}, RicianParams{}, seed);
  s.pw = noise_normalized(PowerConfig{});
  std::uniform_real_distribution<double> u(0.05, 1.0);
  s.w = random_beams(s.ch.sizes().n_t, s.ch.sizes().m, u(rng) * s.pw.p_max, rng);
  s.th = random_phase(s.ch.sizes().k, rng);
  return s;
}

double paired_se(const RVector& a, const RVector& b) {
  RVector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return standard_error(d);
}

int workers() { return resolve_workers(0); }

Outcome c1_identity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t d = 1; d <= 200; ++d) {
    const Sample s = sample(d);
    const auto terms = dl_terms(effective_channels(s.ch, s.th), s.w, s.pw);
    const RVector r = optimal_r(terms, s.pw.sigma2);
    double sum = 0.0;
    for (std::size_t m = 0; m < terms.size(); ++m) sum += rate(sinr(terms[m], s.pw.sigma2));
    worst = std::max(worst, std::abs(lagrangian_objective(terms, r, s.pw.sigma2) - sum));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 5.0, fmt("max |F_D - sum rate| = %.2e (tol 1e-9), %.2f s (limit 5 s)", worst, t)};
}

Outcome c2_anchor_zero() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t d = 1; d <= 200; ++d) {
    const Sample s = sample(1000 + d);
    const auto terms = dl_terms(effective_channels(s.ch, s.th), s.w, s.pw);
    const RVector r = optimal_r(terms, s.pw.sigma2);
    const RVector t = dinkelbach_t(terms, r, s.pw.sigma2);
    for (double v : dinkelbach_terms(terms, r, t, s.pw.sigma2)) worst = std::max(worst, std::abs(v));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-10 && t < 5.0, fmt("max per-term |Ft_D(anchor)| = %.2e (tol 1e-10), %.2f s (limit 5 s)", worst, t)};
}

Outcome c3_stationarity() {
  const double h = 1e-5;
  double worst = 0.0;
  for (std::uint64_t d = 1; d <= 100; ++d) {
    const Sample s = sample(2000 + d);
    const auto terms = dl_terms(effective_channels(s.ch, s.th), s.w, s.pw);
    const RVector r = optimal_r(terms, s.pw.sigma2);
    double g2 = 0.0;
    for (std::size_t m = 0; m < r.size(); ++m) {
      RVector up = r, dn = r;
      up[m] += h;
      dn[m] -= h;
      const double g = (lagrangian_objective(terms, up, s.pw.sigma2) -
                        lagrangian_objective(terms, dn, s.pw.sigma2)) / (2.0 * h);
      g2 += g * g;
    }
    worst = std::max(worst, std::sqrt(g2));
  }
  return {worst <= 1e-6, fmt("max |finite-difference gradient| = %.2e (tol 1e-6)", worst)};
}

Outcome c4_minorants() {
  double bs_gap = 0.0, bs_tan = 0.0, ris_gap = 0.0, ris_tan = 0.0;
  for (std::uint64_t d = 1; d <= 100; ++d) {
    const Sample s = sample(3000 + d);
    const Sizes sz = s.ch.sizes();
    const auto terms = dl_terms(effective_channels(s.ch, s.th), s.w, s.pw);
    const RVector r = optimal_r(terms, s.pw.sigma2);
    const RVector t = dinkelbach_t(terms, r, s.pw.sigma2);
    const double t_bar = threshold_from_db(5.0);
    std::mt19937_64 rng(derive_seed(d, 0x4));

    const BsSubproblemData data = build_bs_data(s.th, s.ch, r, t, s.pw, t_bar, s.w);
    const QuadraticForm bs = sca_bs_objective(data);
    bs_tan = std::max(bs_tan, std::abs(quad_eval(bs, s.w.stacked()) - exact_bs_objective(data, s.w)));

    const ThetaQuadratics tq = build_theta_quadratics(s.w, s.ch, r, t, s.pw, t_bar, s.th.beta);
    const CVector v0 = s.th.unit();
    const ThetaSurrogates sur = sca_theta_surrogates(tq, v0);
    ris_tan = std::max(ris_tan, std::abs(quad_eval(sur.objective, v0) - tq.objective(v0)));

    for (int i = 0; i < 100; ++i) {
      const Beamformer w = random_beams(sz.n_t, sz.m, s.pw.p_max * (i + 1) / 100.0, rng);
      bs_gap = std::max(bs_gap, quad_eval(bs, w.stacked()) - exact_bs_objective(data, w));
      const CVector v = random_phase(sz.k, rng).unit();
      ris_gap = std::max(ris_gap, quad_eval(sur.objective, v) - tq.objective(v));
    }
  }
  const double worst = std::max({bs_gap, bs_tan, ris_gap, ris_tan});
  return {worst <= 1e-10,
          fmt("surrogate - exact: BS %.2e, RIS %.2e; anchor mismatch: BS %.2e, RIS %.2e (tol 1e-10)",
              bs_gap, ris_gap, bs_tan, ris_tan)};
}

Outcome c5_fidelity() {
  double bs = 0.0, ris = 0.0, ul = 0.0;
  for (std::uint64_t d = 1; d <= 100; ++d) {
    const Sample s = sample(4000 + d);
    const Sizes sz = s.ch.sizes();
    const auto terms0 = dl_terms(effective_channels(s.ch, s.th), s.w, s.pw);
    const RVector r = optimal_r(terms0, s.pw.sigma2);
    const RVector t = dinkelbach_t(terms0, r, s.pw.sigma2);
    const double t_bar = threshold_from_db(5.0);
    std::mt19937_64 rng(derive_seed(d, 0x5));

    const BsSubproblemData data = build_bs_data(s.th, s.ch, r, t, s.pw, t_bar, s.w);
    const Beamformer w = random_beams(sz.n_t, sz.m, s.pw.p_max, rng);
    const double direct =
        dinkelbach_objective(dl_terms(effective_channels(s.ch, s.th), w, s.pw), r, t, s.pw.sigma2);
    bs = std::max(bs, std::abs(exact_bs_objective(data, w) - direct) / std::max(1.0, std::abs(direct)));

    const ThetaQuadratics tq = build_theta_quadratics(s.w, s.ch, r, t, s.pw, t_bar, s.th.beta);
    const RisPhase th = random_phase(sz.k, rng, s.th.beta);
    const EffectiveChannels eff = effective_channels(s.ch, th);
    const double want = dinkelbach_objective(dl_terms(eff, s.w, s.pw), r, t, s.pw.sigma2);
    ris = std::max(ris, std::abs(tq.objective(th.unit()) - want) / std::max(1.0, std::abs(want)));
    const UlTerms u = ul_terms(eff, s.w, s.pw);
    const double ul_want = u.signal - t_bar * (u.interference + s.pw.sigma2_u);
    ul = std::max(ul, std::abs(tq.ul_value(th.unit()) - ul_want) / std::max(1.0, u.signal));
  }
  const double worst = std::max({bs, ris, ul});
  return {worst <= 1e-9, fmt("relative error: BS %.2e, RIS objective %.2e, RIS UL %.2e (tol 1e-9)", bs, ris, ul)};
}

Outcome c6_solver() {
  std::mt19937_64 rng(606);
  double worst = 0.0;
  bool all_optimal = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 1 : 2;
    QuadraticForm obj;
    obj.A = (gram(random_cmatrix(n + 1, n, rng)) + CMatrix::identity(n) * cplx(0.1)) * cplx(-1.0);
    obj.b = random_cvec(n, rng, 2.0);
    obj.c = 0.3;
    std::vector<QuadraticForm> cons;
    std::vector<Ball> balls;
    for (int b = 0; b < (trial % 3 == 0 ? 2 : 1); ++b) {
      const CVector center = random_cvec(n, rng, 0.4);
      const double radius = std::sqrt(norm2(center)) + 0.2 + 0.3 * b;
      QuadraticForm c = QuadraticForm::zero(n);
      c.A = CMatrix::identity(n);
      for (std::size_t i = 0; i < n; ++i) c.b[i] = -center[i];
      c.c = norm2(center) - radius * radius;
      cons.push_back(c);
      balls.push_back({real_embed(center), radius});
    }
    const auto p = q::ConvexQcqp::from_complex(obj, cons);
    const auto s = q::solve_any(p, RVector(2 * n, 0.0));
    all_optimal = all_optimal && s.status == q::Status::Optimal;
    worst = std::max(worst, std::abs(s.objective_value - projected_gradient_oracle(p.objective, balls)));
  }

  // max -|x - a|^2 over |x|^2 <= r^2 has value -(|a| - r)^2 when |a| > r.
  double analytic = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const CVector a = random_cvec(n, rng, 2.0);
    const double na = std::sqrt(norm2(a));
    const double r = (trial % 4 < 2 ? 0.5 : 1.5) * na;
    QuadraticForm obj = QuadraticForm::zero(n);
    obj.A = CMatrix::identity(n) * cplx(-1.0);
    obj.b = a;
    obj.c = -norm2(a);
    QuadraticForm ball = QuadraticForm::zero(n);
    ball.A = CMatrix::identity(n);
    ball.c = -r * r;
    const auto s = q::solve_any(q::ConvexQcqp::from_complex(obj, {ball}), RVector(2 * n, 0.0));
    const double want = na > r ? -(na - r) * (na - r) : 0.0;
    all_optimal = all_optimal && s.status == q::Status::Optimal;
    analytic = std::max(analytic, std::abs(s.objective_value - want));
  }
  return {all_optimal && worst <= 1e-4 && analytic <= 1e-6,
          fmt("oracle gap %.2e (tol 1e-4), closed-form gap %.2e (tol 1e-6)", worst, analytic)};
}

// Shared by criteria 7 and 8: 50 drops at the default configuration.
const std::vector<DropOutcome>& default_drops() {
  static const std::vector<DropOutcome> drops = [] {
    ExperimentConfig cfg;
    cfg.drops = 50;
    return run_drops(cfg, workers());
  }();
  return drops;
}

Outcome c7_feasibility() {
  const ExperimentConfig cfg;
  const PowerConfig pw = noise_normalized(cfg.power);
  const double t_bar = cfg.fris.t_bar();
  int converged = 0, bad = 0;
  double worst_slack = 0.0, worst_power = 0.0, worst_ul = INFINITY, worst_mod = 0.0;
  for (const auto& d : default_drops()) {
    const FrisResult& r = d.result;
    if (r.status != FrisStatus::Converged) continue;
    ++converged;
    const ChannelSet ch = generate_drop(cfg.geometry, cfg.sizes, cfg.channel, d.seed);
    const double power = r.w.power() / pw.p_max;
    const double ul = ul_aggregate_sinr(r.w, r.theta, ch, pw) / t_bar;
    double mod = 0.0;
    for (const cplx z : r.theta.unit()) mod = std::max(mod, std::abs(std::abs(z) - 1.0));
    double slack = 0.0;
    for (const auto& h : r.history)
      if (h.ris_iterations > 0) slack = h.slack_sum;
    worst_power = std::max(worst_power, power);
    worst_ul = std::min(worst_ul, ul);
    worst_mod = std::max(worst_mod, mod);
    worst_slack = std::max(worst_slack, slack);
    if (power > 1.0 + 1e-8 || ul < 1.0 - 1e-6 || mod > 4 * DBL_EPSILON || slack > 0.05) ++bad;
  }
  return {converged > 0 && bad == 0,
          fmt("%d converged, %d violating; max P/P_max %.10f, min SINR_U/t %.8f, max ||v|-1| %.1e, "
              "max slack %.2e (tol 0.05)",
              converged, bad, worst_power, worst_ul, worst_mod, worst_slack)};
}

Outcome c8_monotone() {
  int violations = 0;
  double slowest = 0.0;
  for (const auto& d : default_drops()) {
    double best = d.result.initial_dl_sum;
    for (const auto& h : d.result.history) {
      if (h.best_so_far < best) ++violations;
      best = h.best_so_far;
    }
    slowest = std::max(slowest, d.wall_ms / 1000.0);
  }
  return {violations == 0 && slowest < 30.0,
          fmt("50 drops, %d decreases of the best-so-far rate, slowest drop %.2f s (limit 30 s)",
              violations, slowest)};
}

Outcome c9_benchmark() {
  ExperimentConfig cfg;
  cfg.drops = 50;
  const auto drops = run_benchmark(cfg, workers());
  std::map<std::string, RVector> v;
  for (const auto& d : drops)
    for (const auto& s : benchmark_schemes()) v[s].push_back(scheme_value(d, s));
  bool pass = true;
  std::string detail = fmt("%zu paired drops;", drops.size());
  for (const auto& s : benchmark_schemes()) {
    if (s == "fris") continue;
    int wins = 0, losses = 0;
    for (std::size_t i = 0; i < drops.size(); ++i) {
      if (v["fris"][i] > v[s][i]) ++wins;
      if (v["fris"][i] < v[s][i]) ++losses;
    }
    const double p = sign_test_p(wins, losses);
    const bool ok = mean(v["fris"]) > mean(v[s]) && p < 0.05;
    pass = pass && ok;
    detail += fmt(" vs %s %.3f/%.3f p=%.2g%s;", s.c_str(), mean(v["fris"]), mean(v[s]), p, ok ? "" : "(x)");
  }
  // Reported improvements against the cited figures, accepted within 3x.
  auto gain = [&](const char* a, const char* b) { return 100.0 * (mean(v[a]) / mean(v[b]) - 1.0); };
  const struct { const char* a; const char* b; double cited; } cmp[] = {
      {"hd_ris_mrc", "hd_no_ris", 10.0}, {"fd_no_ris", "hd_no_ris", 15.0}, {"fris", "fd_no_ris", 6.0}};
  for (const auto& c : cmp) {
    const double g = gain(c.a, c.b);
    const bool ok = g >= c.cited / 3.0 && g <= 3.0 * c.cited;
    pass = pass && ok;
    detail += fmt(" %s/%s %+.1f%% (cited %.0f%%)%s;", c.a, c.b, g, c.cited, ok ? "" : "(x)");
  }
  return {pass, detail};
}

Outcome c10_distance() {
  ExperimentConfig cfg;
  cfg.drops = 100;
  const auto points = sweep_distance(cfg, workers());
  std::map<std::size_t, std::map<double, const SweepPoint*>> at;
  for (const auto& p : points) at[p.k][p.d] = &p;
  const auto& k16 = at[16];
  double best_d = 0.0, best = -INFINITY;
  for (const auto& [d, p] : k16)
    if (mean(p->dl) > best) best = mean(p->dl), best_d = d;
  const bool argmax_ok = best_d >= 80.0 && best_d <= 120.0;
  const double m40 = mean(k16.at(40.0)->dl), m50 = mean(k16.at(50.0)->dl);
  const bool dip_ok = m50 <= m40;
  int order_bad = 0;
  for (const auto& [d, p16] : k16) {
    const SweepPoint* p8 = at[8].at(d);
    const SweepPoint* p32 = at[32].at(d);
    if (mean(p32->dl) < mean(p16->dl) - paired_se(p32->dl, p16->dl)) ++order_bad;
    if (mean(p16->dl) < mean(p8->dl) - paired_se(p16->dl, p8->dl)) ++order_bad;
  }
  std::string curve;
  for (const auto& [d, p] : k16) curve += fmt(" %.0f:%.3f", d, mean(p->dl));
  return {argmax_ok && dip_ok && order_bad == 0,
          fmt("K=16 argmax d=%.0f m (want [80,120]); mean(50)=%.4f vs mean(40)=%.4f; %d K-order "
              "violations beyond 1 SE; K=16 curve%s",
              best_d, m50, m40, order_bad, curve.c_str())};
}

Outcome c11_users() {
  ExperimentConfig cfg;
  cfg.drops = 50;
  const auto points = sweep_users(cfg, workers());
  // (sweep, m, n) -> gamma -> point
  std::map<std::tuple<std::string, std::size_t, std::size_t>, std::map<double, const SweepPoint*>> at;
  for (const auto& p : points) at[{p.sweep, p.m, p.n}][p.gamma_u_db] = &p;
  int gamma_bad = 0, n_bad = 0;
  for (const auto& [key, g] : at) {
    const SweepPoint* lo = g.at(5.0);
    const SweepPoint* hi = g.at(10.0);
    if (mean(lo->dl) < mean(hi->dl) - paired_se(lo->dl, hi->dl)) ++gamma_bad;
  }
  std::string curve;
  for (double gamma : cfg.sweep.gamma_u_db) {
    const SweepPoint* prev = nullptr;
    for (std::size_t n : cfg.sweep.n_values) {
      const SweepPoint* p = at[{"n", cfg.sweep.fixed_users, n}].at(gamma);
      if (gamma == 5.0) curve += fmt(" %zu:%.3f", n, mean(p->dl));
      if (prev && mean(p->dl) > mean(prev->dl) + paired_se(p->dl, prev->dl)) ++n_bad;
      prev = p;
    }
  }
  return {gamma_bad == 0 && n_bad == 0,
          fmt("%d points with gamma 5 dB below 10 dB beyond 1 SE; %d increases in N beyond 1 SE; "
              "DL vs N at 5 dB%s",
              gamma_bad, n_bad, curve.c_str())};
}

Outcome c12_degenerate() {
  double beta_gap = 0.0, mrt_gap = 0.0;
  for (std::uint64_t d = 1; d <= 20; ++d) {
    const ChannelSet ch = generate_drop(ScenarioGeometry{}, Sizes{}, RicianParams{}, d);
    FrisConfig cfg;
    cfg.beta = 0.0;
    const FrisResult a = run_fris(ch, PowerConfig{}, cfg, d);
    const FrisResult b = run_fris(ch.without_ris(), PowerConfig{}, cfg, d);
    auto gap = [](const RVector& x, const RVector& y) -> double {
      if (x.size() != y.size()) return INFINITY;
      double g = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) g = std::max(g, std::abs(x[i] - y[i]));
      return g;
    };
    beta_gap = std::max({beta_gap, gap(a.rates.dl_rate, b.rates.dl_rate),
                         std::abs(a.rates.ul_rate - b.rates.ul_rate),
                         gap(a.rates.ul_ue_rate, b.rates.ul_ue_rate)});
    if (a.status != b.status) beta_gap = INFINITY;

    Sizes one;
    one.k = 0;
    one.m = 1;
    one.n = 0;
    const ChannelSet single = generate_drop(ScenarioGeometry{}, one, RicianParams{}, d);
    const PowerConfig pw;
    const FrisResult r = run_fris(single, pw, FrisConfig{}, d);
    const double f = single.D.frobenius_norm();
    const double closed = std::log2(1.0 + pw.p_d * pw.p_max * f * f / pw.sigma2);
    mrt_gap = std::max(mrt_gap, std::abs(r.rates.dl_sum() - closed));
  }
  return {beta_gap <= 1e-9 && mrt_gap <= 1e-3,
          fmt("beta=0 vs K=0 max rate gap %.2e (tol 1e-9); single-user vs closed-form MRT %.2e (tol 1e-3)",
              beta_gap, mrt_gap)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Lagrangian identity", c1_identity},
      {"Dinkelbach anchor zero", c2_anchor_zero},
      {"stationarity in r", c3_stationarity},
      {"SCA minorants", c4_minorants},
      {"quadratic-form fidelity", c5_fidelity},
      {"solver oracle equivalence", c6_solver},
      {"feasibility of converged results", c7_feasibility},
      {"monotone historical best", c8_monotone},
      {"benchmark ordering", c9_benchmark},
      {"distance trend", c10_distance},
      {"user-count trends", c11_users},
      {"degenerate equivalences", c12_degenerate},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
