#include "risfd/ris_subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace risfd {
namespace {

ThetaTerm zero_term(std::size_t k) {
  ThetaTerm t;
  t.omega = CMatrix(k, k);
  t.psi = CMatrix(k, k);
  t.zeta.assign(k, cplx{});
  return t;
}

// Adds weight * ||a + G v||^2 to the term: the Gram goes to omega for a
// positive weight and to psi for a negative one.
void accumulate(ThetaTerm& term, const AffineThetaMap& map, double weight) {
  if (weight == 0.0) return;
  const std::size_t k = map.gain.cols();
  CMatrix& target = weight > 0.0 ? term.omega : term.psi;
  const double w_abs = std::abs(weight);
  for (std::size_t r = 0; r < map.gain.rows(); ++r) {
    const auto g = map.gain.row(r);
    for (std::size_t i = 0; i < k; ++i) {
      const cplx gi = std::conj(g[i]) * w_abs;
      for (std::size_t j = 0; j < k; ++j) target(i, j) += gi * g[j];
      term.zeta[i] += weight * std::conj(g[i]) * map.base[r];
    }
    term.c += weight * std::norm(map.base[r]);
  }
}

CVector unit_vector(std::size_t n, std::size_t i) {
  CVector e(n);
  e[i] = 1.0;
  return e;
}

// q(v) = v^H A v + 2 Re{b^H v} + c into the first 2K real coordinates of an
// extended problem.
void embed_into(const RealQuadratic& r, std::size_t dim, RealQuadratic& out) {
  const std::size_t n = r.q.size();
  out.P = RMatrix(dim, dim);
  out.q.assign(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.q[i] = r.q[i];
    if (!r.P.empty())
      for (std::size_t j = 0; j < n; ++j) out.P(i, j) = r.P(i, j);
  }
  out.c = r.c;
}

bool ul_ok(const ThetaQuadratics& tq, std::span<const cplx> v) {
  return !tq.ul_active || tq.ul_value(v) >= -tq.ul_tolerance;
}

CVector project_unit(std::span<const cplx> v) {
  CVector out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double a = std::abs(v[k]);
    out[k] = a > 0.0 ? v[k] / a : cplx(1.0, 0.0);
  }
  return out;
}

}  // namespace

double ThetaTerm::eval(std::span<const cplx> v) const {
  const CVector ov = omega * v;
  const CVector pv = psi * v;
  return dotc(v, ov).real() - dotc(v, pv).real() + 2.0 * dotc(zeta, v).real() + c;
}

double ThetaQuadratics::objective(std::span<const cplx> v) const {
  double s = 0.0;
  for (const auto& t : dl) s += t.eval(v);
  return s;
}

double ThetaQuadratics::ul_value(std::span<const cplx> v) const { return ul.eval(v); }

ThetaTerm ThetaQuadratics::dl_total() const {
  ThetaTerm total = zero_term(dim());
  for (const auto& t : dl) {
    total.omega += t.omega;
    total.psi += t.psi;
    for (std::size_t k = 0; k < total.zeta.size(); ++k) total.zeta[k] += t.zeta[k];
    total.c += t.c;
  }
  return total;
}

ThetaQuadratics build_theta_quadratics(const Beamformer& w, const ChannelSet& ch,
                                       std::span<const double> r, std::span<const double> t,
                                       const PowerConfig& power, double t_bar, double beta) {
  const Sizes s = ch.sizes();
  if (r.size() != s.m || t.size() != s.m)
    throw DimensionError("build_theta_quadratics: r and t need one entry per DL UE");
  if (w.n_t() != s.n_t || w.users() != s.m)
    throw DimensionError("build_theta_quadratics: beamformer shape");

  ThetaQuadratics tq;
  tq.ul = zero_term(s.k);
  std::vector<CVector> beams;
  for (std::size_t m = 0; m < s.m; ++m) beams.push_back(w.beam(m));

  for (std::size_t m = 0; m < s.m; ++m) {
    ThetaTerm term = zero_term(s.k);
    const CMatrix d_m = row_matrix(ch.D, m);
    const CMatrix d2_m = row_matrix(ch.D2, m);
    const CMatrix v_m = row_matrix(ch.V, m);
    accumulate(term, cascade_affine(d_m, d2_m, ch.D1, beams[m], beta), (1.0 + r[m]) * power.p_d);
    for (std::size_t j = 0; j < s.m; ++j)
      accumulate(term, cascade_affine(d_m, d2_m, ch.D1, beams[j], beta), -t[m] * power.p_d);
    for (std::size_t n = 0; n < s.n; ++n)
      accumulate(term, cascade_affine(v_m, d2_m, ch.U1, unit_vector(s.n, n), beta),
                 -t[m] * power.p_u);
    term.c -= t[m] * power.sigma2;
    tq.dl.push_back(std::move(term));
  }

  tq.ul_active = s.n > 0 && t_bar > 0.0;
  if (tq.ul_active) {
    for (std::size_t n = 0; n < s.n; ++n)
      accumulate(tq.ul, cascade_affine(ch.U, ch.U2, ch.U1, unit_vector(s.n, n), beta), power.p_u);
    for (std::size_t m = 0; m < s.m; ++m)
      accumulate(tq.ul, cascade_affine(ch.S, ch.U2, ch.D1, beams[m], beta), -t_bar * power.p_d);
    tq.ul.c -= t_bar * power.sigma2_u;
    tq.ul_tolerance = 1e-8 * t_bar * power.sigma2_u;
  }
  return tq;
}

ThetaSurrogates sca_theta_surrogates(const ThetaQuadratics& tq, std::span<const cplx> anchor) {
  const std::size_t k = tq.dim();
  if (anchor.size() != k) throw DimensionError("sca_theta_surrogates: anchor length");
  ThetaSurrogates out;

  const ThetaTerm total = tq.dl_total();
  const CVector ov = total.omega * anchor;
  out.objective.A = total.psi * cplx(-1.0);
  out.objective.b.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.objective.b[i] = ov[i] + total.zeta[i];
  out.objective.c = total.c - dotc(anchor, ov).real();

  out.ul_constraint = QuadraticForm::zero(k);
  if (tq.ul_active) {
    const CVector uv = tq.ul.omega * anchor;
    out.ul_constraint.A = tq.ul.psi;
    for (std::size_t i = 0; i < k; ++i) out.ul_constraint.b[i] = -(uv[i] + tq.ul.zeta[i]);
    out.ul_constraint.c = -tq.ul.c + dotc(anchor, uv).real();
  }
  return out;
}

qcqp::ConvexQcqp pccp_problem(const ThetaQuadratics& tq, const PccpState& state,
                              double slack_cap) {
  const std::size_t k = tq.dim();
  if (state.anchor.size() != k) throw DimensionError("pccp_problem: anchor length");
  if (!(state.lambda >= 0.0)) throw std::invalid_argument("pccp_problem: lambda must be >= 0");
  const ThetaSurrogates sur = sca_theta_surrogates(tq, state.anchor);

  qcqp::ConvexQcqp p;
  p.dim = 4 * k;
  embed_into(real_embed(sur.objective), p.dim, p.objective);
  for (std::size_t i = 2 * k; i < 4 * k; ++i) p.objective.q[i] = -0.5 * state.lambda;

  if (tq.ul_active) {
    RealQuadratic ul;
    embed_into(real_embed(sur.ul_constraint), 2 * k, ul);
    p.constraints.push_back(qcqp::Constraint::dense(ul));
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t re = i, im = k + i, a = 2 * k + i, b = 3 * k + i;
    // |v_i|^2 - 1 - a_i <= 0
    qcqp::Constraint mod;
    mod.index = {re, im, a};
    mod.P = RMatrix(3, 3);
    mod.P(0, 0) = mod.P(1, 1) = 1.0;
    mod.q = {0.0, 0.0, -0.5};
    mod.c = -1.0;
    p.constraints.push_back(std::move(mod));
    // 1 - b_i - (2 Re{conj(v0_i) v_i} - |v0_i|^2) <= 0
    const cplx v0 = state.anchor[i];
    p.constraints.push_back(qcqp::Constraint::affine(
        {re, im, b}, {-2.0 * v0.real(), -2.0 * v0.imag(), -1.0}, 1.0 + std::norm(v0)));
    p.constraints.push_back(qcqp::Constraint::affine({a}, {-1.0}, 0.0));
    p.constraints.push_back(qcqp::Constraint::affine({b}, {-1.0}, 0.0));
    p.constraints.push_back(qcqp::Constraint::affine({a}, {1.0}, -slack_cap));
    p.constraints.push_back(qcqp::Constraint::affine({b}, {1.0}, -slack_cap));
  }
  return p;
}

PccpStep pccp_step(const ThetaQuadratics& tq, const PccpState& state,
                   const qcqp::SolverOptions& solver, double slack_cap, double start_slack) {
  const std::size_t k = tq.dim();
  const qcqp::ConvexQcqp p = pccp_problem(tq, state, slack_cap);

  // Start at the anchor with slacks just large enough to be interior.
  RVector x0(4 * k);
  for (std::size_t i = 0; i < k; ++i) {
    const cplx v0 = state.anchor[i];
    const double mod2 = std::norm(v0);
    x0[i] = v0.real();
    x0[k + i] = v0.imag();
    x0[2 * k + i] = std::min(std::max(mod2 - 1.0, 0.0) + start_slack, 0.999 * slack_cap);
    x0[3 * k + i] = std::min(std::max(1.0 - mod2, 0.0) + start_slack, 0.999 * slack_cap);
  }
  const qcqp::QcqpSolution sol = qcqp::solve_any(p, x0, solver);

  PccpStep step;
  step.status = sol.status;
  step.objective = sol.objective_value;
  step.v.resize(k);
  step.a.resize(k);
  step.b.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    step.v[i] = cplx(sol.x[i], sol.x[k + i]);
    step.a[i] = sol.x[2 * k + i];
    step.b[i] = sol.x[3 * k + i];
  }
  return step;
}

void RisOptions::validate() const {
  if (!(kappa >= 1.0)) throw std::invalid_argument("RisOptions: kappa must be >= 1");
  if (!(lambda0 > 0.0) || !(lambda_max >= lambda0))
    throw std::invalid_argument("RisOptions: need 0 < lambda0 <= lambda_max");
  if (!(rho_theta > 0.0)) throw std::invalid_argument("RisOptions: rho_theta must be positive");
  if (max_iter < 1) throw std::invalid_argument("RisOptions: max_iter must be >= 1");
  if (!(slack_cap > 0.0) || !(start_slack > 0.0) || !(start_slack < slack_cap))
    throw std::invalid_argument("RisOptions: need 0 < start_slack < slack_cap");
}

RVector lambda_schedule(const RisOptions& opts, int steps) {
  RVector out;
  double lambda = opts.lambda0;
  for (int i = 0; i < steps; ++i) {
    lambda = std::min(opts.kappa * lambda, opts.lambda_max);
    out.push_back(lambda);
  }
  return out;
}

RisResult solve_ris(const ThetaQuadratics& tq, const RisPhase& init, const RisOptions& opts) {
  opts.validate();
  const std::size_t k = tq.dim();
  if (init.size() != k) throw DimensionError("solve_ris: initial phase length");

  RisResult res;
  res.phase = init;
  const CVector v_init = init.unit();
  const bool init_ok = ul_ok(tq, v_init);
  if (k == 0) {
    res.status = init_ok ? StepStatus::Converged : StepStatus::Infeasible;
    return res;
  }

  CVector last_feasible;
  if (init_ok) last_feasible = v_init;
  PccpState state{opts.lambda0, v_init};
  double prev = tq.objective(v_init);
  CVector v = v_init;
  res.status = StepStatus::MaxIter;

  for (int q = 1; q <= opts.max_iter; ++q) {
    state.lambda = std::min(opts.kappa * state.lambda, opts.lambda_max);
    res.lambda_trace.push_back(state.lambda);
    const PccpStep step = pccp_step(tq, state, opts.solver, opts.slack_cap, opts.start_slack);
    res.iterations = q;
    if (step.status == qcqp::Status::Infeasible ||
        step.status == qcqp::Status::NumericalBreakdown) {
      res.status = StepStatus::SolverFailure;
      break;
    }
    v = step.v;
    double slack = 0.0, mod_err = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      slack += step.a[i] + step.b[i];
      mod_err = std::max(mod_err, std::abs(std::abs(v[i]) - 1.0));
    }
    res.slack_sum = slack;
    res.max_modulus_error = mod_err;
    const double val = tq.objective(v);
    res.objective_history.push_back(val);

    const CVector projected = project_unit(v);
    if (ul_ok(tq, projected)) last_feasible = projected;

    if (std::abs(val - prev) <= opts.rho_theta && slack <= opts.slack_tol) {
      res.status = StepStatus::Converged;
      break;
    }
    prev = val;
    state.anchor = v;
  }

  const CVector projected = project_unit(v);
  if (res.iterations > 0 && res.status != StepStatus::SolverFailure && ul_ok(tq, projected)) {
    res.phase = RisPhase::from_unit(projected, init.beta);
  } else if (!last_feasible.empty()) {
    res.phase = RisPhase::from_unit(last_feasible, init.beta);
    res.fallback = true;
  } else {
    res.phase = init;
    res.fallback = true;
    res.status = StepStatus::Infeasible;
  }
  return res;
}

}  // namespace risfd
