#include "risfd/qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "risfd/kernels.hpp"

namespace risfd::qcqp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Values and gradients of one constraint restricted to its index set.
struct LocalEval {
  double value = 0.0;
  RVector grad;  // local coordinates
};

void gather(const Constraint& con, std::span<const double> x, RVector& local) {
  local.resize(con.index.size());
  for (std::size_t k = 0; k < con.index.size(); ++k) local[k] = x[con.index[k]];
}

LocalEval eval_local(const Constraint& con, std::span<const double> x, RVector& scratch) {
  const auto& kt = kernels::active();
  const std::size_t m = con.index.size();
  gather(con, x, scratch);
  LocalEval out;
  out.grad.assign(m, 0.0);
  if (!con.P.empty()) kt.gemv(con.P.data().data(), m, m, scratch.data(), out.grad.data());
  // grad = 2 (P x + q); value = x'Px + 2q'x + c
  const double xpx = kt.dot(scratch.data(), out.grad.data(), m);
  const double qx = kt.dot(con.q.data(), scratch.data(), m);
  out.value = xpx + 2.0 * qx + con.c;
  for (std::size_t k = 0; k < m; ++k) out.grad[k] = 2.0 * (out.grad[k] + con.q[k]);
  return out;
}

RVector objective_gradient(const RealQuadratic& f, std::span<const double> x) {
  const std::size_t n = f.q.size();
  RVector g(n, 0.0);
  if (!f.P.empty()) kernels::active().gemv(f.P.data().data(), n, n, x.data(), g.data());
  for (std::size_t i = 0; i < n; ++i) g[i] = 2.0 * (g[i] + f.q[i]);
  return g;
}

// |x'Px| + 2|q'x| + |c|: the size of the terms that cancel in f(x).
double objective_magnitude(const RealQuadratic& f, std::span<const double> x) {
  const std::size_t n = f.q.size();
  const auto& kt = kernels::active();
  double xpx = 0.0;
  if (!f.P.empty()) {
    RVector px(n, 0.0);
    kt.gemv(f.P.data().data(), n, n, x.data(), px.data());
    xpx = kt.dot(x.data(), px.data(), n);
  }
  return std::abs(xpx) + 2.0 * std::abs(kt.dot(f.q.data(), x.data(), n)) + std::abs(f.c);
}

double norm(std::span<const double> v) {
  return std::sqrt(kernels::active().dot(v.data(), v.data(), v.size()));
}

// Minimizes psi(x) = -t f0(x) - sum log(-q_i(x)).
class Barrier {
 public:
  explicit Barrier(const ConvexQcqp& p) : p_(p) {}

  const ConvexQcqp& problem() const { return p_; }

  double psi(std::span<const double> x, double t) const {
    double s = -t * real_quad_eval(p_.objective, x);
    for (const auto& con : p_.constraints) {
      const double v = con.eval(x);
      if (!(v < 0.0)) return kInf;
      s -= std::log(-v);
    }
    return s;
  }

  // Fills gradient and Hessian of psi; returns false if x is not strictly
  // feasible.
  bool derivatives(std::span<const double> x, double t, RVector& g, RMatrix& h) {
    const std::size_t n = p_.dim;
    const auto& kt = kernels::active();
    g = objective_gradient(p_.objective, x);
    for (auto& v : g) v *= -t;
    h = RMatrix(n, n);
    if (!p_.objective.P.empty()) {
      const auto& src = p_.objective.P.data();
      auto& dst = h.data();
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = -2.0 * t * src[i];
    }
    RVector local;
    for (const auto& con : p_.constraints) {
      LocalEval e = eval_local(con, x, local);
      if (!(e.value < 0.0)) return false;
      const double inv = 1.0 / (-e.value);
      const std::size_t m = con.index.size();
      for (std::size_t a = 0; a < m; ++a) g[con.index[a]] += inv * e.grad[a];
      if (m == n && is_identity_index(con)) {
        if (!con.P.empty()) {
          kt.axpy(2.0 * inv, con.P.data().data(), h.data().data(), n * n);
        }
        kt.syr(inv * inv, e.grad.data(), n, h.data().data(), n);
      } else {
        for (std::size_t a = 0; a < m; ++a) {
          double* hrow = h.row_ptr(con.index[a]);
          const double ga = inv * inv * e.grad[a];
          for (std::size_t b = 0; b < m; ++b) {
            double v = ga * e.grad[b];
            if (!con.P.empty()) v += 2.0 * inv * con.P(a, b);
            hrow[con.index[b]] += v;
          }
        }
      }
    }
    return true;
  }

 private:
  static bool is_identity_index(const Constraint& con) {
    for (std::size_t k = 0; k < con.index.size(); ++k)
      if (con.index[k] != k) return false;
    return true;
  }

  const ConvexQcqp& p_;
};

struct CenterResult {
  bool converged = false;
  bool breakdown = false;
  int iterations = 0;
};

CenterResult center(Barrier& barrier, RVector& x, double t, const SolverOptions& opts,
                    int budget) {
  CenterResult res;
  const std::size_t n = x.size();
  RVector g, trial(n);
  RMatrix h;
  for (int it = 0; it < std::min(opts.max_newton_per_stage, budget); ++it) {
    if (!barrier.derivatives(x, t, g, h)) {
      res.breakdown = true;
      return res;
    }
    ++res.iterations;
    RMatrix l = h;
    if (!cholesky_factor(l)) {
      // Flat directions (rank-deficient Gram blocks): Levenberg-style shift.
      const double shift = 1e-10 * std::max(std::abs(h.trace()), 1e-12);
      l = h;
      for (std::size_t i = 0; i < n; ++i) l(i, i) += shift;
      if (!cholesky_factor(l)) {
        res.breakdown = true;
        return res;
      }
    }
    RVector neg_g(n);
    for (std::size_t i = 0; i < n; ++i) neg_g[i] = -g[i];
    const RVector dx = cholesky_solve(l, neg_g);
    const double slope = kernels::active().dot(g.data(), dx.data(), n);  // -lambda^2
    const double f0 = barrier.psi(x, t);
    // Below this the decrement is rounding noise from the t * f0 terms.
    const double floor = 1e-13 * t * objective_magnitude(barrier.problem().objective, x);
    if (-slope / 2.0 <= std::max(opts.newton_tol, floor)) {
      res.converged = true;
      return res;
    }
    double step = 1.0;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * dx[i];
      const double f1 = barrier.psi(trial, t);
      if (f1 <= f0 + opts.ls_alpha * step * slope) break;
      step *= opts.ls_beta;
      if (step < 1e-14) {
        // No further progress representable in double precision.
        res.converged = true;
        return res;
      }
    }
    x = trial;
  }
  return res;
}

using StopFn = std::function<bool(const RVector&)>;

// Barrier duals 1/(t |q_i|) are only as accurate as the last centering. Refit
// the duals of the nearly active constraints by least squares on the
// stationarity condition and keep the refit when it lowers the residual.
void refine_duals(const ConvexQcqp& p, std::span<const double> x, RVector& duals) {
  double top = 0.0;
  for (double d : duals) top = std::max(top, d);
  if (!(top > 0.0)) return;
  std::vector<std::size_t> act;
  for (std::size_t i = 0; i < duals.size(); ++i)
    if (duals[i] >= 1e-6 * top) act.push_back(i);
  if (act.empty() || act.size() > p.dim) return;

  const std::size_t na = act.size();
  std::vector<RVector> grads(na, RVector(p.dim, 0.0));
  RVector local;
  for (std::size_t a = 0; a < na; ++a) {
    const auto& con = p.constraints[act[a]];
    const LocalEval e = eval_local(con, x, local);
    for (std::size_t k = 0; k < con.index.size(); ++k) grads[a][con.index[k]] += e.grad[k];
  }
  const RVector g = objective_gradient(p.objective, x);
  RMatrix normal(na, na);
  RVector rhs(na, 0.0);
  double trace = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = a; b < na; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < p.dim; ++k) s += grads[a][k] * grads[b][k];
      normal(a, b) = normal(b, a) = s;
    }
    for (std::size_t k = 0; k < p.dim; ++k) rhs[a] += grads[a][k] * g[k];
    trace += normal(a, a);
  }
  const double ridge = 1e-12 * std::max(trace / static_cast<double>(na), 1e-300);
  for (std::size_t a = 0; a < na; ++a) normal(a, a) += ridge;
  if (!cholesky_factor(normal)) return;
  const RVector mu = cholesky_solve(normal, rhs);

  RVector trial = duals;
  for (std::size_t a = 0; a < na; ++a) trial[act[a]] = std::max(mu[a], 0.0);
  if (kkt_residual(p, x, trial) < kkt_residual(p, x, duals)) duals = std::move(trial);
}

QcqpSolution barrier_method(const ConvexQcqp& p, std::span<const double> x0,
                            const SolverOptions& opts, const StopFn& stop) {
  QcqpSolution sol;
  sol.x.assign(x0.begin(), x0.end());
  const double m = static_cast<double>(p.constraints.size());
  Barrier barrier(p);
  // Start with t f0 on the order of the barrier terms so that the method
  // behaves the same for any scaling of the objective.
  const double f_scale = objective_magnitude(p.objective, sol.x) +
                       norm(objective_gradient(p.objective, sol.x)) * (1.0 + norm(sol.x));
  double t = f_scale > 0.0 ? opts.t0 * std::max(1.0, m) / f_scale : opts.t0;
  bool breakdown = false;
  bool finished = false;
  for (;;) {
    const int budget = opts.max_newton_total - sol.newton_iterations;
    if (budget <= 0) break;
    const CenterResult cr = center(barrier, sol.x, t, opts, budget);
    sol.newton_iterations += cr.iterations;
    if (cr.breakdown) {
      breakdown = true;
      break;
    }
    sol.stage_objectives.push_back(real_quad_eval(p.objective, sol.x));
    sol.gap_estimate = m / t;
    if (stop && stop(sol.x)) {
      finished = true;
      break;
    }
    if (!cr.converged) continue;  // keep centering with the remaining budget
    if (m == 0.0 || m / t <= opts.tol * std::max(1.0, objective_magnitude(p.objective, sol.x))) {
      finished = true;
      break;
    }
    t *= opts.mu;
  }

  sol.objective_value = real_quad_eval(p.objective, sol.x);
  sol.duals.resize(p.constraints.size());
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const double v = p.constraints[i].eval(sol.x);
    sol.duals[i] = v < 0.0 ? 1.0 / (t * (-v)) : 0.0;
  }
  if (finished) refine_duals(p, sol.x, sol.duals);
  sol.kkt_residual = kkt_residual(p, sol.x, sol.duals);
  const double scale = 1.0 + norm(objective_gradient(p.objective, sol.x));
  if (breakdown) {
    sol.status = Status::NumericalBreakdown;
  } else if (finished && sol.kkt_residual <= opts.kkt_tol * scale + m / t) {
    sol.status = Status::Optimal;
  } else {
    sol.status = Status::MaxIter;
  }
  return sol;
}

}  // namespace

Constraint Constraint::dense(const RealQuadratic& r) {
  Constraint c;
  c.index.resize(r.q.size());
  std::iota(c.index.begin(), c.index.end(), std::size_t{0});
  c.P = r.P;
  c.q = r.q;
  c.c = r.c;
  return c;
}

Constraint Constraint::affine(std::vector<std::size_t> index, RVector coeffs, double c) {
  Constraint con;
  con.index = std::move(index);
  con.q = std::move(coeffs);
  for (auto& v : con.q) v *= 0.5;
  con.c = c;
  return con;
}

double Constraint::eval(std::span<const double> x) const {
  const std::size_t m = index.size();
  double v = c;
  for (std::size_t a = 0; a < m; ++a) {
    const double xa = x[index[a]];
    v += 2.0 * q[a] * xa;
    if (!P.empty()) {
      const double* prow = P.row_ptr(a);
      double s = 0.0;
      for (std::size_t b = 0; b < m; ++b) s += prow[b] * x[index[b]];
      v += xa * s;
    }
  }
  return v;
}

ConvexQcqp ConvexQcqp::from_complex(const QuadraticForm& objective,
                                    const std::vector<QuadraticForm>& constraints) {
  ConvexQcqp p;
  p.dim = 2 * objective.dim();
  p.objective = real_embed(objective);
  for (const auto& c : constraints) {
    if (c.dim() != objective.dim()) throw DimensionError("from_complex: constraint dimension");
    p.constraints.push_back(Constraint::dense(real_embed(c)));
  }
  return p;
}

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Optimal:
      return "optimal";
    case Status::MaxIter:
      return "max_iter";
    case Status::Infeasible:
      return "infeasible";
    case Status::NumericalBreakdown:
      return "numerical_breakdown";
  }
  return "unknown";
}

double objective_value(const ConvexQcqp& p, std::span<const double> x) {
  return real_quad_eval(p.objective, x);
}

double max_constraint(const ConvexQcqp& p, std::span<const double> x) {
  double worst = -kInf;
  for (const auto& c : p.constraints) worst = std::max(worst, c.eval(x));
  return worst;
}

double kkt_residual(const ConvexQcqp& p, std::span<const double> x,
                    std::span<const double> duals) {
  if (duals.size() != p.constraints.size())
    throw DimensionError("kkt_residual: one dual per constraint expected");
  RVector r = objective_gradient(p.objective, x);
  double slack = 0.0;
  RVector local;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    if (duals[i] < 0.0) throw std::invalid_argument("kkt_residual: negative dual");
    const auto& con = p.constraints[i];
    LocalEval e = eval_local(con, x, local);
    for (std::size_t a = 0; a < con.index.size(); ++a) r[con.index[a]] -= duals[i] * e.grad[a];
    slack += std::abs(duals[i] * e.value);
  }
  return norm(r) + slack;
}

FeasibilityResult find_feasible(const ConvexQcqp& p, std::span<const double> start,
                                const SolverOptions& opts) {
  const std::size_t n = p.dim;
  RVector x0(n, 0.0);
  if (!start.empty()) {
    if (start.size() != n) throw DimensionError("find_feasible: start dimension");
    std::copy(start.begin(), start.end(), x0.begin());
  }
  FeasibilityResult res;
  const double worst = max_constraint(p, x0);
  if (p.constraints.empty() || worst < 0.0) {
    res.feasible = true;
    res.x = x0;
    res.max_violation = p.constraints.empty() ? -kInf : worst;
    return res;
  }

  // Extended variable (x, s): maximize -s subject to q_i(x) - s <= 0, s >= -1.
  ConvexQcqp ext;
  ext.dim = n + 1;
  ext.objective.q.assign(n + 1, 0.0);
  ext.objective.q[n] = -0.5;
  for (const auto& con : p.constraints) {
    Constraint e;
    const std::size_t m = con.index.size();
    e.index = con.index;
    e.index.push_back(n);
    if (!con.P.empty()) {
      e.P = RMatrix(m + 1, m + 1);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) e.P(a, b) = con.P(a, b);
    }
    e.q = con.q;
    e.q.push_back(-0.5);
    e.c = con.c;
    ext.constraints.push_back(std::move(e));
  }
  ext.constraints.push_back(Constraint::affine({n}, {-1.0}, -1.0));

  RVector z(x0);
  z.push_back(worst + std::max(1.0, std::abs(worst)));
  const double margin = opts.feasibility_tol;
  auto stop = [&](const RVector& v) {
    return max_constraint(p, std::span<const double>(v.data(), n)) < -margin;
  };
  const QcqpSolution sol = barrier_method(ext, z, opts, stop);
  res.x.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
  res.max_violation = max_constraint(p, res.x);
  res.feasible = res.max_violation < 0.0;
  return res;
}

QcqpSolution solve(const ConvexQcqp& p, std::span<const double> x0,
                   const SolverOptions& opts) {
  if (x0.size() != p.dim) throw DimensionError("solve: x0 dimension");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");
  if (!(max_constraint(p, x0) < 0.0) && !p.constraints.empty())
    throw std::invalid_argument("solve: x0 is not strictly feasible");
  return barrier_method(p, x0, opts, nullptr);
}

QcqpSolution solve_any(const ConvexQcqp& p, std::span<const double> hint,
                       const SolverOptions& opts) {
  RVector start(p.dim, 0.0);
  if (hint.size() == p.dim) std::copy(hint.begin(), hint.end(), start.begin());
  if (p.constraints.empty() || max_constraint(p, start) < 0.0) return solve(p, start, opts);
  const FeasibilityResult f = find_feasible(p, start, opts);
  if (!f.feasible) {
    QcqpSolution sol;
    sol.x = f.x;
    sol.status = Status::Infeasible;
    sol.objective_value = real_quad_eval(p.objective, f.x);
    sol.gap_estimate = kInf;
    sol.kkt_residual = kInf;
    return sol;
  }
  return solve(p, f.x, opts);
}

}  // namespace risfd::qcqp
