#pragma once
// Alternating optimization of the DL beams and the RIS phases.
//
// Each outer iteration freezes the auxiliaries r (current SINRs) and t
// (Dinkelbach ratios) at the previous iterate, improves the beams with the
// phases fixed, then improves the phases with the new beams fixed. Progress
// is judged on the exact DL sum rate, and the best exactly-feasible iterate
// is what gets returned.

#include <optional>
#include <string>
#include <vector>

#include "risfd/bs_subproblem.hpp"
#include "risfd/ris_subproblem.hpp"
#include "risfd/system_model.hpp"

namespace risfd {

struct FrisConfig {
  double rho = 0.01;        // outer tolerance on the exact DL sum rate
  int max_outer = 20;
  BsOptions bs;
  RisOptions ris;
  double gamma_u_db = 5.0;  // UL QoS as an SINR in dB
  std::optional<double> t_th_u;  // UL QoS as a rate (bit/s/Hz), overrides gamma
  double beta = 0.9;        // RIS reflection amplitude
  bool optimize_phases = true;   // false keeps the random initial phases
  double collapse_drop = 0.10;   // relative one-step drop that stops the loop
  double init_margin = 0.999;

  void validate() const;
  double t_bar() const;
};

enum class FrisStatus { Converged, MaxIter, Infeasible };
std::string_view fris_status_name(FrisStatus s);

struct OuterRecord {
  int iteration = 0;
  double dl_sum_rate = 0.0;  // exact
  double ul_rate = 0.0;      // aggregate
  double ul_sinr = 0.0;
  double surrogate = 0.0;    // Dinkelbach objective with this iteration's r, t
  double power = 0.0;
  bool power_ok = false;
  bool qos_ok = false;
  bool modulus_ok = false;
  bool feasible = false;
  double best_so_far = 0.0;
  int bs_iterations = 0;
  int ris_iterations = 0;
  StepStatus bs_status = StepStatus::Converged;
  StepStatus ris_status = StepStatus::Converged;
  double slack_sum = 0.0;
  double max_modulus_error = 0.0;
  bool ris_fallback = false;
};

struct FrisResult {
  Beamformer w;
  RisPhase theta;
  RateReport rates;
  FrisStatus status = FrisStatus::Infeasible;
  double initial_dl_sum = 0.0;
  bool collapse = false;  // stopped by the collapse guard
  std::vector<OuterRecord> history;

  int outer_iterations() const { return static_cast<int>(history.size()); }
  std::string to_json() const;
};

struct FrisInit {
  Beamformer w;
  RisPhase theta;
  bool feasible = false;
};

// Random phases, MRT on the resulting effective channels at full power, and
// a common down-scaling when the UL QoS would otherwise fail.
FrisInit initialize(const ChannelSet& ch, const PowerConfig& power, const FrisConfig& cfg,
                    std::uint64_t seed);

// Feasibility of a candidate against the exact constraints.
struct FeasibilityCheck {
  bool power_ok = false;
  bool qos_ok = false;
  bool modulus_ok = false;
  bool all() const { return power_ok && qos_ok && modulus_ok; }
};
FeasibilityCheck check_feasibility(const Beamformer& w, const RisPhase& theta,
                                   const ChannelSet& ch, const PowerConfig& power,
                                   double t_bar);

FrisResult run_fris(const ChannelSet& ch, const PowerConfig& power, const FrisConfig& cfg,
                    std::uint64_t seed);

// Powers divided by sigma2 so that surrogate values are in noise units.
PowerConfig noise_normalized(const PowerConfig& power);

}  // namespace risfd
