#pragma once
// Fractional-programming rewrites of the DL sum rate and the UL QoS.
//
// Lagrangian dual form, with auxiliaries r_m:
//   F_D = sum_m log2(1 + r_m) - (1/ln 2) sum_m [r_m - (1 + r_m) D_S / (D_S + D_I + D_C + sigma2)]
// Its maximizer over r is r_m = SINR_m, where it equals the sum rate.
//
// Dinkelbach form, for ratios t_m taken at an anchor:
//   Ft_D = sum_m (1 + r_m) D_S - t_m (D_S + D_I + D_C + sigma2)
// which is zero at the anchor that produced t.

#include <vector>

#include "risfd/system_model.hpp"

namespace risfd {

struct TransformState {
  RVector r;
  RVector t;
  double t_bar = 0.0;  // SINR-domain UL threshold
  double xi_u = 0.0;   // UL interference budget
};

RVector optimal_r(const std::vector<DlTerms>& terms, double sigma2);
RVector optimal_r(const Beamformer& w, const RisPhase& ris, const ChannelSet& ch,
                  const PowerConfig& power);

double lagrangian_objective(const std::vector<DlTerms>& terms, std::span<const double> r,
                            double sigma2);
double lagrangian_objective(const Beamformer& w, const RisPhase& ris, std::span<const double> r,
                            const ChannelSet& ch, const PowerConfig& power);

// t_m = (1 + r_m) D_S / (D_S + D_I + D_C + sigma2); 0 when that denominator is 0.
RVector dinkelbach_t(const std::vector<DlTerms>& terms, std::span<const double> r, double sigma2);
RVector dinkelbach_t(const Beamformer& w, const RisPhase& ris, std::span<const double> r,
                     const ChannelSet& ch, const PowerConfig& power);

// Per-user terms of Ft_D.
RVector dinkelbach_terms(const std::vector<DlTerms>& terms, std::span<const double> r,
                         std::span<const double> t, double sigma2);
double dinkelbach_objective(const std::vector<DlTerms>& terms, std::span<const double> r,
                            std::span<const double> t, double sigma2);

// 2^rate - 1
double threshold_from_rate(double t_th_u);
// QoS given in dB of SINR: t_bar = 10^(gamma/10).
double threshold_from_db(double gamma_db);
double rate_from_db(double gamma_db);

// xi_U = (U_S - t_bar sigma2_U) / t_bar. SINR_U >= t_bar  <=>  U_I <= xi_U.
// A negative value means the QoS cannot be met for this reflection.
double qos_budget(double ul_signal, double t_bar, double sigma2_u);
double qos_budget(const RisPhase& ris, const ChannelSet& ch, const PowerConfig& power,
                  double t_th_u);

}  // namespace risfd
