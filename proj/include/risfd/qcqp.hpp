#pragma once
// Log-barrier interior-point solver for
//
//   maximize   x'P0 x + 2 q0'x + c0        (P0 negative semidefinite)
//   subject to x'Pi x + 2 qi'x + ci <= 0   (Pi positive semidefinite)
//
// over real x. Complex problems go through real_embed first. Constraints are
// stored on the subset of coordinates they touch, which keeps the per-element
// unit-modulus constraints of the phase subproblem cheap.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "risfd/linalg.hpp"

namespace risfd::qcqp {

struct Constraint {
  std::vector<std::size_t> index;  // coordinates this constraint depends on
  RMatrix P;                       // index.size() square; empty when affine
  RVector q;                       // index.size()
  double c = 0.0;

  static Constraint dense(const RealQuadratic& r);
  // sum_k coeffs[k] * x[index[k]] + c <= 0
  static Constraint affine(std::vector<std::size_t> index, RVector coeffs, double c);

  double eval(std::span<const double> x) const;
};

struct ConvexQcqp {
  std::size_t dim = 0;
  RealQuadratic objective;  // maximized
  std::vector<Constraint> constraints;

  // Complex-variable convenience: embeds objective and constraints.
  static ConvexQcqp from_complex(const QuadraticForm& objective,
                                 const std::vector<QuadraticForm>& constraints);
};

enum class Status { Optimal, MaxIter, Infeasible, NumericalBreakdown };
std::string_view status_name(Status s);

struct SolverOptions {
  double tol = 1e-8;          // stop once m / t <= tol * max(1, |x'P0x| + 2|q0'x| + |c0|)
  double t0 = 1.0;           // relative to m / (size of f0 at the start point)
  double mu = 10.0;           // t <- mu * t
  double newton_tol = 1e-9;   // lambda^2 / 2
  double ls_alpha = 0.3;
  double ls_beta = 0.8;
  int max_newton_per_stage = 200;
  int max_newton_total = 4000;
  double feasibility_tol = 1e-8;
  double kkt_tol = 1e-6;      // relative to 1 + |grad objective|
};

struct QcqpSolution {
  RVector x;
  RVector duals;
  double objective_value = 0.0;
  double kkt_residual = 0.0;
  double gap_estimate = 0.0;
  Status status = Status::MaxIter;
  int newton_iterations = 0;
  // Objective value at the end of each barrier stage.
  std::vector<double> stage_objectives;
};

struct FeasibilityResult {
  bool feasible = false;
  RVector x;
  // max_i q_i(x) at the returned point (negative when feasible). When
  // infeasible this is the minimized max-violation, a certificate > 0.
  double max_violation = 0.0;
};

double objective_value(const ConvexQcqp& p, std::span<const double> x);
double max_constraint(const ConvexQcqp& p, std::span<const double> x);

// Phase-1: minimize s subject to q_i(x) <= s, stopping as soon as s < 0.
FeasibilityResult find_feasible(const ConvexQcqp& p, std::span<const double> start = {},
                                const SolverOptions& opts = {});

// x0 must be strictly feasible.
QcqpSolution solve(const ConvexQcqp& p, std::span<const double> x0,
                   const SolverOptions& opts = {});

// Uses `hint` when it is strictly feasible, otherwise runs phase-1 first.
QcqpSolution solve_any(const ConvexQcqp& p, std::span<const double> hint,
                       const SolverOptions& opts = {});

// ||grad f0 - sum mu_i grad q_i|| + sum |mu_i q_i(x)|
double kkt_residual(const ConvexQcqp& p, std::span<const double> x,
                    std::span<const double> duals);

}  // namespace risfd::qcqp
