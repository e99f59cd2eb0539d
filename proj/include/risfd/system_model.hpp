#pragma once
// Received powers, SINRs and rates of the RIS-assisted full-duplex link.
//
// Symbols are unit-variance and independent, so every power below is an
// expected power: p_D and p_U scale the streams, W carries the DL beams.
//
//   DL UE m:  signal  D_S = p_D |d_m w_m|^2,  d_m = D_m + D2_m Theta D1
//             inter   D_I = p_D sum_{m' != m} |d_m w_m'|^2
//             CCI     D_C = p_U ||V_m + D2_m Theta U1||^2
//   BS (UL):  U_S = p_U ||U + U2 Theta U1||_F^2
//             U_I = p_D sum_m ||(S + U2 Theta D1) w_m||^2
//   SINR_D,m = D_S / (D_I + D_C + sigma2),  SINR_U = U_S / (U_I + sigma2_U)

#include <string>
#include <vector>

#include "risfd/channel.hpp"
#include "risfd/linalg.hpp"

namespace risfd {

struct PowerConfig {
  double p_d = 1.0;         // W, DL per-stream scale
  double p_u = 0.01;        // W, per UL UE
  double p_max = 1.0;       // W, budget on sum ||w_m||^2
  double sigma2 = 1e-12;    // W, DL UE noise
  double sigma2_u = 1e-12;  // W, BS receive noise

  void validate() const;
};

struct Beamformer {
  CMatrix W;  // N_t x M

  Beamformer() = default;
  explicit Beamformer(CMatrix w) : W(std::move(w)) {}
  static Beamformer zeros(std::size_t n_t, std::size_t m) { return Beamformer(CMatrix(n_t, m)); }

  std::size_t n_t() const { return W.rows(); }
  std::size_t users() const { return W.cols(); }
  CVector beam(std::size_t m) const { return W.col(m); }
  double power() const;  // sum_m ||w_m||^2

  // Columns stacked into one vector of length N_t * M.
  CVector stacked() const;
  static Beamformer from_stacked(std::span<const cplx> x, std::size_t n_t, std::size_t m);
};

struct RisPhase {
  RVector theta;  // radians
  double beta = 0.9;

  std::size_t size() const { return theta.size(); }
  CVector unit() const;        // e^{j theta}
  CVector reflection() const;  // beta e^{j theta}
  static RisPhase from_unit(std::span<const cplx> v, double beta);
};

// signal(v) = base + gain * v, v = e^{j theta}; beta is folded into gain.
struct AffineThetaMap {
  CVector base;
  CMatrix gain;

  CVector eval(std::span<const cplx> v) const;
};

// (X + A Theta B) v  =  X v + beta A diag(B v) e^{j theta}.
AffineThetaMap cascade_affine(const CMatrix& X, const CMatrix& A, const CMatrix& B,
                              std::span<const cplx> v, double beta);

// Effective channels for the current reflection.
struct EffectiveChannels {
  CMatrix dl;   // M x N_t    D + D2 Theta D1
  CMatrix cci;  // M x N      V + D2 Theta U1
  CMatrix ul;   // N_r x N    U + U2 Theta U1
  CMatrix si;   // N_r x N_t  S + U2 Theta D1
};

EffectiveChannels effective_channels(const ChannelSet& ch, const RisPhase& ris);

struct DlTerms {
  double signal = 0.0;
  double interference = 0.0;
  double cci = 0.0;
};

struct UlTerms {
  double signal = 0.0;
  double interference = 0.0;
};

std::vector<DlTerms> dl_terms(const EffectiveChannels& eff, const Beamformer& w,
                              const PowerConfig& power);
UlTerms ul_terms(const EffectiveChannels& eff, const Beamformer& w, const PowerConfig& power);

double sinr(const DlTerms& t, double sigma2);
double dl_sinr(std::size_t m, const Beamformer& w, const RisPhase& ris, const ChannelSet& ch,
               const PowerConfig& power);
double ul_aggregate_sinr(const Beamformer& w, const RisPhase& ris, const ChannelSet& ch,
                         const PowerConfig& power);

// log2(1 + max(sinr, 0))
double rate(double sinr);

struct RateReport {
  RVector dl_sinr;
  RVector dl_rate;
  double ul_sinr = 0.0;  // aggregate, the quantity the QoS constraint uses
  double ul_rate = 0.0;
  // Per-UL-UE figures under an MRC receiver; reporting only.
  RVector ul_ue_sinr;
  RVector ul_ue_rate;

  double dl_sum() const;
  double ul_ue_sum() const;

  static std::string csv_header(std::size_t m, std::size_t n);
  std::string csv_row(std::uint64_t drop_id) const;
};

RateReport rates(const Beamformer& w, const RisPhase& ris, const ChannelSet& ch,
                 const PowerConfig& power);

}  // namespace risfd
