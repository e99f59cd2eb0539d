#pragma once
// Active beamforming step: the RIS reflection is fixed and the DL beams are
// improved by successive convex approximation of the Dinkelbach objective.
//
// With d_m the effective DL row of user m and the beams stacked as
// w = [w_1; ...; w_M], the objective is
//   sum_m w_m^H Omega_m w_m - t_m (sum_m' w_m'^H G_m w_m' + n_m)
// where Omega_m = (1 + r_m) p_D d_m^H d_m and G_m = p_D d_m^H d_m. The convex
// signal term is replaced by its tangent at the anchor, which gives a concave
// minorant that is tight there.

#include <vector>

#include "risfd/qcqp.hpp"
#include "risfd/system_model.hpp"
#include "risfd/transforms.hpp"

namespace risfd {

enum class UlConstraintMode { Sca, Direct };

struct BsSubproblemData {
  std::vector<CMatrix> omega;  // signal weights Omega_m
  std::vector<CMatrix> gram;   // G_m
  CMatrix omega_u;             // p_D S_w^H S_w, S_w = S + U2 Theta D1
  RVector n;                   // D_C,m + sigma2
  RVector t;
  double xi_u = 0.0;
  bool ul_active = false;      // false when there are no UL UEs or no threshold
  double p_max = 0.0;
  Beamformer anchor;

  std::size_t n_t() const { return omega_u.rows(); }
  std::size_t users() const { return omega.size(); }
};

// t_bar <= 0 disables the UL constraint. xi_u < 0 marks the step infeasible.
BsSubproblemData build_bs_data(const RisPhase& ris, const ChannelSet& ch,
                               std::span<const double> r, std::span<const double> t,
                               const PowerConfig& power, double t_bar,
                               const Beamformer& anchor);

// Exact Dinkelbach objective as a function of the beams.
double exact_bs_objective(const BsSubproblemData& data, const Beamformer& w);

// Concave minorant over the stacked beams, tangent at data.anchor.
QuadraticForm sca_bs_objective(const BsSubproblemData& data);

// sum_m w_m^H Omega_U w_m - xi_U <= 0. The expected-power interference has no
// cross terms between beams, so the linearized form of Sca mode coincides
// with the exact convex constraint of Direct mode.
QuadraticForm sca_ul_constraint(const BsSubproblemData& data, UlConstraintMode mode);

// ||w||^2 - P_max <= 0 on the stacked beams.
QuadraticForm power_constraint(std::size_t dim, double p_max);

struct BsOptions {
  UlConstraintMode mode = UlConstraintMode::Sca;
  double rho_w = 0.01;
  int max_iter = 30;
  double anchor_shrink = 0.999;  // pulls the anchor strictly inside
  qcqp::SolverOptions solver;
};

enum class StepStatus { Converged, MaxIter, Infeasible, SolverFailure };
std::string_view step_status_name(StepStatus s);

struct BsResult {
  Beamformer w;
  StepStatus status = StepStatus::Infeasible;
  int iterations = 0;
  RVector objective_history;  // exact objective after each SCA iteration
};

BsResult solve_bs(const BsSubproblemData& data, const BsOptions& opts = {});

}  // namespace risfd
