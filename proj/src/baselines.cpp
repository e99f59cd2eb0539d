#include "risfd/baselines.hpp"

#include <cmath>
#include <numbers>

namespace risfd {

Beamformer mrt_beamformer(const ChannelSet& ch, const RisPhase& ris, const PowerConfig& power) {
  const EffectiveChannels eff = effective_channels(ch, ris);
  const std::size_t m_count = eff.dl.rows();
  const std::size_t n_t = eff.dl.cols();
  CMatrix w(n_t, m_count);
  for (std::size_t m = 0; m < m_count; ++m)
    for (std::size_t t = 0; t < n_t; ++t) w(t, m) = std::conj(eff.dl(m, t));
  const double f = w.frobenius_norm();
  if (f > 0.0) w *= cplx(std::sqrt(power.p_max) / f);
  return Beamformer(std::move(w));
}

RisPhase mrc_ris_phases(const ChannelSet& ch, double beta) {
  const Sizes s = ch.sizes();
  RisPhase out;
  out.beta = beta;
  out.theta.assign(s.k, 0.0);
  if (s.k == 0 || s.m == 0) return out;

  std::size_t best = 0;
  double best_norm = -1.0;
  for (std::size_t m = 0; m < s.m; ++m) {
    const double n = norm2(ch.D.row(m));
    if (n > best_norm) {
      best_norm = n;
      best = m;
    }
  }
  CVector w(s.n_t);
  if (best_norm > 0.0) {
    const double scale = 1.0 / std::sqrt(best_norm);
    for (std::size_t t = 0; t < s.n_t; ++t) w[t] = std::conj(ch.D(best, t)) * scale;
  } else {
    w[0] = 1.0;
  }
  cplx direct = 0.0;
  for (std::size_t t = 0; t < s.n_t; ++t) direct += ch.D(best, t) * w[t];
  const double ref = std::abs(direct) > 0.0 ? std::arg(direct) : 0.0;
  const CVector d1w = ch.D1 * w;
  for (std::size_t k = 0; k < s.k; ++k) {
    const cplx path = ch.D2(best, k) * d1w[k];
    double th = ref - (std::abs(path) > 0.0 ? std::arg(path) : 0.0);
    th = std::remainder(th, 2.0 * std::numbers::pi);
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    out.theta[k] = th;
  }
  return out;
}

HdRates hd_rates(const ChannelSet& ch, const RisPhase& ris, const PowerConfig& power) {
  HdRates hd;
  const Beamformer w = mrt_beamformer(ch, ris, power);
  PowerConfig dl_only = power;
  dl_only.p_u = 0.0;  // UL UEs silent during the DL slot
  hd.dl_slot = rates(w, ris, ch, dl_only);
  hd.ul_slot = rates(Beamformer::zeros(w.n_t(), w.users()), ris, ch, power);
  hd.dl_sum = hd.dl_slot.dl_sum();
  hd.ul_rate = hd.ul_slot.ul_rate;
  hd.sum_rate = 0.5 * (hd.dl_sum + hd.ul_rate);
  return hd;
}

FrisResult fd_no_ris(const ChannelSet& ch, const PowerConfig& power, const FrisConfig& cfg,
                     std::uint64_t seed) {
  return run_fris(ch.without_ris(), power, cfg, seed);
}

FrisResult random_phase_ris(const ChannelSet& ch, const PowerConfig& power, FrisConfig cfg,
                            std::uint64_t seed) {
  cfg.optimize_phases = false;
  return run_fris(ch, power, cfg, seed);
}

double fd_sum_rate(const RateReport& r) { return r.dl_sum() + r.ul_rate; }

}  // namespace risfd
