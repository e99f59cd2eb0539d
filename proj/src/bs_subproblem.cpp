#include "risfd/bs_subproblem.hpp"

#include <cmath>
#include <limits>

namespace risfd {
namespace {

QuadraticForm sca_objective_at(const BsSubproblemData& data, const Beamformer& anchor) {
  const std::size_t n_t = data.n_t();
  const std::size_t m_count = data.users();
  CMatrix penalty(n_t, n_t);
  for (std::size_t m = 0; m < m_count; ++m) penalty -= data.gram[m] * cplx(data.t[m]);

  QuadraticForm q = QuadraticForm::zero(n_t * m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const std::size_t off = m * n_t;
    for (std::size_t i = 0; i < n_t; ++i)
      for (std::size_t j = 0; j < n_t; ++j) q.A(off + i, off + j) = penalty(i, j);
    const CVector wp = anchor.beam(m);
    const CVector ow = data.omega[m] * wp;
    for (std::size_t i = 0; i < n_t; ++i) q.b[off + i] = ow[i];
    q.c -= dotc(wp, ow).real() + data.t[m] * data.n[m];
  }
  return q;
}

bool exactly_feasible(const BsSubproblemData& data, const Beamformer& w) {
  if (w.power() > data.p_max * (1.0 + 1e-9)) return false;
  if (!data.ul_active) return true;
  const double ui = quad_eval(sca_ul_constraint(data, UlConstraintMode::Direct), w.stacked());
  return ui <= 1e-9 * std::max(1.0, std::abs(data.xi_u));
}

}  // namespace

std::string_view step_status_name(StepStatus s) {
  switch (s) {
    case StepStatus::Converged: return "converged";
    case StepStatus::MaxIter: return "max_iter";
    case StepStatus::Infeasible: return "infeasible";
    case StepStatus::SolverFailure: return "solver_failure";
  }
  return "unknown";
}

BsSubproblemData build_bs_data(const RisPhase& ris, const ChannelSet& ch,
                               std::span<const double> r, std::span<const double> t,
                               const PowerConfig& power, double t_bar,
                               const Beamformer& anchor) {
  const EffectiveChannels eff = effective_channels(ch, ris);
  const std::size_t m_count = eff.dl.rows();
  if (r.size() != m_count || t.size() != m_count)
    throw DimensionError("build_bs_data: r and t need one entry per DL UE");
  if (anchor.n_t() != eff.dl.cols() || anchor.users() != m_count)
    throw DimensionError("build_bs_data: anchor shape");

  BsSubproblemData data;
  data.p_max = power.p_max;
  data.anchor = anchor;
  data.t.assign(t.begin(), t.end());
  for (std::size_t m = 0; m < m_count; ++m) {
    CMatrix g = gram(row_matrix(eff.dl, m));
    g *= cplx(power.p_d);
    data.omega.push_back(g * cplx(1.0 + r[m]));
    data.gram.push_back(std::move(g));
    data.n.push_back(power.p_u * norm2(eff.cci.row(m)) + power.sigma2);
  }
  data.omega_u = gram(eff.si);
  data.omega_u *= cplx(power.p_d);

  data.ul_active = eff.ul.cols() > 0 && t_bar > 0.0;
  if (data.ul_active) {
    const double f = eff.ul.frobenius_norm();
    data.xi_u = qos_budget(power.p_u * f * f, t_bar, power.sigma2_u);
  }
  return data;
}

double exact_bs_objective(const BsSubproblemData& data, const Beamformer& w) {
  double total = 0.0;
  for (std::size_t m = 0; m < data.users(); ++m) {
    const CVector wm = w.beam(m);
    total += dotc(wm, data.omega[m] * wm).real();
    double load = data.n[m];
    for (std::size_t j = 0; j < data.users(); ++j) {
      const CVector wj = w.beam(j);
      load += dotc(wj, data.gram[m] * wj).real();
    }
    total -= data.t[m] * load;
  }
  return total;
}

QuadraticForm sca_bs_objective(const BsSubproblemData& data) {
  return sca_objective_at(data, data.anchor);
}

QuadraticForm sca_ul_constraint(const BsSubproblemData& data, UlConstraintMode) {
  const std::size_t n_t = data.n_t();
  QuadraticForm q = QuadraticForm::zero(n_t * data.users());
  for (std::size_t m = 0; m < data.users(); ++m)
    for (std::size_t i = 0; i < n_t; ++i)
      for (std::size_t j = 0; j < n_t; ++j) q.A(m * n_t + i, m * n_t + j) = data.omega_u(i, j);
  q.c = -data.xi_u;
  return q;
}

QuadraticForm power_constraint(std::size_t dim, double p_max) {
  QuadraticForm q = QuadraticForm::zero(dim);
  q.A = CMatrix::identity(dim);
  q.c = -p_max;
  return q;
}

BsResult solve_bs(const BsSubproblemData& data, const BsOptions& opts) {
  BsResult res;
  res.w = data.anchor;
  if (data.ul_active && data.xi_u < 0.0) return res;

  const std::size_t n_t = data.n_t();
  const std::size_t m_count = data.users();
  const std::size_t dim = n_t * m_count;
  std::vector<QuadraticForm> constraints{power_constraint(dim, data.p_max)};
  if (data.ul_active) constraints.push_back(sca_ul_constraint(data, opts.mode));

  double best = -std::numeric_limits<double>::infinity();
  double prev = best;
  if (exactly_feasible(data, data.anchor)) {
    best = prev = exact_bs_objective(data, data.anchor);
  }
  Beamformer cur = data.anchor;
  res.status = StepStatus::MaxIter;
  bool any = std::isfinite(best);

  for (int p = 1; p <= opts.max_iter; ++p) {
    const auto problem = qcqp::ConvexQcqp::from_complex(sca_objective_at(data, cur), constraints);
    CVector hint = cur.stacked();
    for (auto& z : hint) z *= opts.anchor_shrink;
    const auto sol = qcqp::solve_any(problem, real_embed(hint), opts.solver);
    res.iterations = p;
    if (sol.status == qcqp::Status::Infeasible) {
      if (!any) res.status = StepStatus::Infeasible;
      break;
    }
    if (sol.status == qcqp::Status::NumericalBreakdown || sol.x.empty()) {
      res.status = any ? StepStatus::SolverFailure : StepStatus::Infeasible;
      break;
    }
    const Beamformer next = Beamformer::from_stacked(complex_unembed(sol.x), n_t, m_count);
    const double val = exact_bs_objective(data, next);
    res.objective_history.push_back(val);
    if (val > best && exactly_feasible(data, next)) {
      best = val;
      res.w = next;
      any = true;
    }
    if (std::abs(val - prev) <= opts.rho_w) {
      res.status = StepStatus::Converged;
      break;
    }
    prev = val;
    cur = next;
  }
  if (!any) res.status = StepStatus::Infeasible;
  return res;
}

}  // namespace risfd
