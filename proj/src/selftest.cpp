#include "risfd/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "risfd/bs_subproblem.hpp"
#include "risfd/channel.hpp"
#include "risfd/fris.hpp"
#include "risfd/qcqp.hpp"
#include "risfd/ris_subproblem.hpp"
#include "risfd/transforms.hpp"

namespace risfd {
namespace {

struct Sample {
  ChannelSet ch;
  PowerConfig power;
  Beamformer w;
  RisPhase theta;
};

CVector random_cvec(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  CVector v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

Sample make_sample(std::uint64_t seed) {
  Sizes sizes;
  sizes.n_t = 4;
  sizes.n_r = 4;
  sizes.k = 8;
  sizes.m = 3;
  sizes.n = 2;
  Sample s;
  s.ch = generate_drop(ScenarioGeometry{}, sizes, RicianParams{}, seed);
  s.power = noise_normalized(PowerConfig{});
  std::mt19937_64 rng(derive_seed(seed, 99));
  CVector x = random_cvec(sizes.n_t * sizes.m, rng);
  const double scale = std::sqrt(s.power.p_max / norm2(x));
  for (auto& z : x) z *= scale;
  s.w = Beamformer::from_stacked(x, sizes.n_t, sizes.m);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  s.theta.theta.resize(sizes.k);
  for (auto& t : s.theta.theta) t = u(rng);
  return s;
}

// Moves x by a random perturbation of relative size `step`.
CVector perturb(std::span<const cplx> x, double step, std::mt19937_64& rng) {
  const double size = std::sqrt(norm2(x) / std::max<std::size_t>(x.size(), 1));
  CVector d = random_cvec(x.size(), rng, step * std::max(size, 1e-300));
  for (std::size_t i = 0; i < x.size(); ++i) d[i] += x[i];
  return d;
}

struct Tracker {
  SelftestCheck c;
  Tracker(std::string name, double tol) {
    c.name = std::move(name);
    c.tolerance = tol;
  }
  void see(double violation) { c.worst = std::max(c.worst, violation); }
  SelftestCheck done() {
    c.passed = std::isfinite(c.worst) && c.worst <= c.tolerance;
    return c;
  }
};

}  // namespace

std::vector<SelftestCheck> run_selftest(Fault fault, std::uint64_t seed, int trials) {
  Tracker identity("lagrangian identity at r = SINR", 1e-9);
  Tracker anchor_zero("dinkelbach objective zero at its anchor", 1e-10);
  Tracker bs_minorant("beamforming surrogate is a tight minorant", 1e-10);
  Tracker ris_minorant("phase surrogate is a tight minorant", 1e-10);
  Tracker bs_fidelity("beamforming data matches the system model", 1e-9);
  Tracker ris_fidelity("phase quadratics match the system model", 1e-9);
  Tracker cascade("cascade map matches effective channels", 1e-12);
  const double t_bar = threshold_from_db(5.0);

  for (int trial = 0; trial < trials; ++trial) {
    Sample s = make_sample(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    std::mt19937_64 rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(trial)));
    const auto terms = dl_terms(effective_channels(s.ch, s.theta), s.w, s.power);

    const RVector r = optimal_r(terms, s.power.sigma2);
    double sum_rate = 0.0;
    for (const auto& t : terms) sum_rate += rate(sinr(t, s.power.sigma2));
    identity.see(std::abs(lagrangian_objective(terms, r, s.power.sigma2) - sum_rate));

    const RVector t = dinkelbach_t(terms, r, s.power.sigma2);
    for (double v : dinkelbach_terms(terms, r, t, s.power.sigma2)) anchor_zero.see(std::abs(v));

    // Beamforming step.
    BsSubproblemData data = build_bs_data(s.theta, s.ch, r, t, s.power, t_bar, s.w);
    if (fault == Fault::OmegaSign)
      for (auto& om : data.omega) om = om * cplx(-1.0);
    const QuadraticForm qb = sca_bs_objective(data);
    const double exact_anchor = exact_bs_objective(data, s.w);
    const double scale_b = 1.0 + std::abs(exact_anchor);
    bs_minorant.see(std::abs(quad_eval(qb, s.w.stacked()) - exact_anchor) / scale_b);
    for (int p = 0; p < 10; ++p) {
      const CVector x = perturb(s.w.stacked(), 0.5, rng);
      const Beamformer wx = Beamformer::from_stacked(x, s.w.n_t(), s.w.users());
      bs_minorant.see((quad_eval(qb, x) - exact_bs_objective(data, wx)) / scale_b);
      if (fault == Fault::None) {
        const auto tx = dl_terms(effective_channels(s.ch, s.theta), wx, s.power);
        const double direct = dinkelbach_objective(tx, r, t, s.power.sigma2);
        bs_fidelity.see(std::abs(exact_bs_objective(data, wx) - direct) /
                        (1.0 + std::abs(direct)));
      }
    }

    // Phase step.
    const ThetaQuadratics tq =
        build_theta_quadratics(s.w, s.ch, r, t, s.power, t_bar, s.theta.beta);
    const CVector v0 = s.theta.unit();
    const ThetaSurrogates sur = sca_theta_surrogates(tq, v0);
    const double exact_v0 = tq.objective(v0);
    const double scale_v = 1.0 + std::abs(exact_v0);
    ris_minorant.see(std::abs(quad_eval(sur.objective, v0) - exact_v0) / scale_v);
    for (int p = 0; p < 10; ++p) {
      const CVector v = perturb(v0, 0.5, rng);
      ris_minorant.see((quad_eval(sur.objective, v) - tq.objective(v)) / scale_v);
      RisPhase ph = RisPhase::from_unit(v, s.theta.beta);
      CVector vu = ph.unit();
      const auto tv = dl_terms(effective_channels(s.ch, ph), s.w, s.power);
      const double direct = dinkelbach_objective(tv, r, t, s.power.sigma2);
      ris_fidelity.see(std::abs(tq.objective(vu) - direct) / (1.0 + std::abs(direct)));
    }

    // Cascade identity on the DL effective channel applied to beam 0.
    const EffectiveChannels eff = effective_channels(s.ch, s.theta);
    const CVector w0 = s.w.beam(0);
    const AffineThetaMap map = cascade_affine(s.ch.D, s.ch.D2, s.ch.D1, w0, s.theta.beta);
    const CVector lhs = map.eval(v0);
    const CVector rhs = eff.dl * w0;
    double err = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) err = std::max(err, std::abs(lhs[i] - rhs[i]));
    cascade.see(err / (1.0 + std::sqrt(norm2(rhs))));
  }

  // Projection of a onto the unit ball: maximize -||x - a||^2 s.t. ||x||^2 <= 1.
  Tracker oracle("solver matches the closed-form projection", 1e-6);
  {
    std::mt19937_64 rng(derive_seed(seed, 7));
    for (int trial = 0; trial < 5; ++trial) {
      CVector a = random_cvec(2, rng);
      const double na = std::sqrt(norm2(a));
      for (auto& z : a) z *= (1.5 + trial) / na;
      QuadraticForm obj = QuadraticForm::zero(2);
      for (std::size_t i = 0; i < 2; ++i) {
        obj.A(i, i) = -1.0;
        obj.b[i] = a[i];
      }
      obj.c = -norm2(a);
      QuadraticForm ball = QuadraticForm::zero(2);
      for (std::size_t i = 0; i < 2; ++i) ball.A(i, i) = 1.0;
      ball.c = -1.0;
      const auto prob = qcqp::ConvexQcqp::from_complex(obj, {ball});
      const auto sol = qcqp::solve_any(prob, RVector(4, 0.0));
      const double expected = -(1.5 + trial - 1.0) * (1.5 + trial - 1.0);
      oracle.see(sol.status == qcqp::Status::Optimal ? std::abs(sol.objective_value - expected)
                                                     : INFINITY);
    }
  }

  return {identity.done(),    anchor_zero.done(),  bs_minorant.done(), ris_minorant.done(),
          bs_fidelity.done(), ris_fidelity.done(), cascade.done(),     oracle.done()};
}

void print_selftest(const std::vector<SelftestCheck>& checks, std::ostream& os) {
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %-48s %12s %12s\n", "result", "check", "worst", "tol");
  os << line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-6s %-48s %12.3e %12.3e\n", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.worst, c.tolerance);
    os << line;
  }
}

bool all_passed(const std::vector<SelftestCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

}  // namespace risfd
