#pragma once
// Passive beamforming step: the beams are fixed and the RIS phase vector
// v = e^{j theta} is improved. Every received power is |a + G v|^2 for an
// affine map from cascade_affine, so the Dinkelbach objective and the UL QoS
// are both differences of convex quadratics in v:
//
//   Ft_D(v) = sum_m v^H Omega_m v - v^H Psi_m v + 2 Re{zeta_m^H v} + c_m
//   UL(v)   = v^H Omega_U v - v^H Psi_U v + 2 Re{zeta_U^H v} + c_U  >= 0
//
// The unit-modulus constraint |v_k| = 1 is split into |v_k|^2 <= 1 + a_k and
// a linearized |v_k|^2 >= 1 - b_k, with slacks penalized by a growing lambda.

#include <vector>

#include "risfd/bs_subproblem.hpp"
#include "risfd/qcqp.hpp"
#include "risfd/system_model.hpp"

namespace risfd {

struct ThetaTerm {
  CMatrix omega;  // convex part (signal)
  CMatrix psi;    // concave part (interference, noise)
  CVector zeta;
  double c = 0.0;

  double eval(std::span<const cplx> v) const;
};

struct ThetaQuadratics {
  std::vector<ThetaTerm> dl;  // one per DL UE
  ThetaTerm ul;
  bool ul_active = false;
  // Accepted shortfall of UL(v) below 0, small against t_bar * sigma2_U.
  double ul_tolerance = 0.0;

  std::size_t dim() const { return ul.zeta.size(); }
  double objective(std::span<const cplx> v) const;  // sum of dl terms
  double ul_value(std::span<const cplx> v) const;   // >= 0 when the QoS holds
  ThetaTerm dl_total() const;
};

// t_bar <= 0 disables the UL constraint.
ThetaQuadratics build_theta_quadratics(const Beamformer& w, const ChannelSet& ch,
                                       std::span<const double> r, std::span<const double> t,
                                       const PowerConfig& power, double t_bar, double beta);

struct ThetaSurrogates {
  QuadraticForm objective;      // concave minorant of Ft_D, tight at the anchor
  QuadraticForm ul_constraint;  // <= 0 form; implies UL(v) >= 0
};

ThetaSurrogates sca_theta_surrogates(const ThetaQuadratics& tq, std::span<const cplx> anchor);

struct PccpState {
  double lambda = 1.0;
  CVector anchor;
};

struct PccpStep {
  CVector v;
  RVector a;
  RVector b;
  double objective = 0.0;  // penalized surrogate value at the optimum
  qcqp::Status status = qcqp::Status::MaxIter;
};

// Builds the penalized convex program over x = [Re v; Im v; a; b].
qcqp::ConvexQcqp pccp_problem(const ThetaQuadratics& tq, const PccpState& state,
                              double slack_cap);
PccpStep pccp_step(const ThetaQuadratics& tq, const PccpState& state,
                   const qcqp::SolverOptions& solver = {}, double slack_cap = 3.0,
                   double start_slack = 0.1);

struct RisOptions {
  double kappa = 3.0;
  double lambda0 = 1.0;
  double lambda_max = 1e4;
  double rho_theta = 0.01;
  int max_iter = 30;
  double slack_tol = 1e-3;  // converged only once the slacks are this small
  double slack_cap = 3.0;   // keeps the program bounded while lambda is small
  double start_slack = 0.1;
  qcqp::SolverOptions solver;

  void validate() const;
};

struct RisResult {
  RisPhase phase;
  StepStatus status = StepStatus::Infeasible;
  int iterations = 0;
  bool fallback = false;     // the projected point failed the UL QoS
  double slack_sum = 0.0;    // before projection, last iterate
  double max_modulus_error = 0.0;  // max | |v_k| - 1 | before projection
  RVector lambda_trace;
  RVector objective_history;  // exact Ft_D at each (unprojected) iterate
};

// lambda_{q} = min(kappa lambda_{q-1}, lambda_max), starting from lambda0.
RVector lambda_schedule(const RisOptions& opts, int steps);

RisResult solve_ris(const ThetaQuadratics& tq, const RisPhase& init, const RisOptions& opts = {});

}  // namespace risfd
