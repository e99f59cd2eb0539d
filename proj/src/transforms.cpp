#include "risfd/transforms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risfd {
namespace {

double total(const DlTerms& t, double sigma2) {
  return t.signal + t.interference + t.cci + sigma2;
}

void require_len(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": length mismatch");
}

std::vector<DlTerms> terms_at(const Beamformer& w, const RisPhase& ris, const ChannelSet& ch,
                              const PowerConfig& power) {
  return dl_terms(effective_channels(ch, ris), w, power);
}

}  // namespace

RVector optimal_r(const std::vector<DlTerms>& terms, double sigma2) {
  RVector r;
  r.reserve(terms.size());
  for (const auto& t : terms) r.push_back(sinr(t, sigma2));
  return r;
}

RVector optimal_r(const Beamformer& w, const RisPhase& ris, const ChannelSet& ch,
                  const PowerConfig& power) {
  return optimal_r(terms_at(w, ris, ch, power), power.sigma2);
}

double lagrangian_objective(const std::vector<DlTerms>& terms, std::span<const double> r,
                            double sigma2) {
  require_len(terms.size(), r.size(), "lagrangian_objective");
  double logs = 0.0, linear = 0.0;
  for (std::size_t m = 0; m < terms.size(); ++m) {
    if (r[m] < 0.0) throw std::invalid_argument("lagrangian_objective: r must be >= 0");
    logs += std::log2(1.0 + r[m]);
    const double den = total(terms[m], sigma2);
    const double frac = den > 0.0 ? terms[m].signal / den : 0.0;
    linear += r[m] - (1.0 + r[m]) * frac;
  }
  return logs - linear / std::numbers::ln2;
}

double lagrangian_objective(const Beamformer& w, const RisPhase& ris, std::span<const double> r,
                            const ChannelSet& ch, const PowerConfig& power) {
  return lagrangian_objective(terms_at(w, ris, ch, power), r, power.sigma2);
}

RVector dinkelbach_t(const std::vector<DlTerms>& terms, std::span<const double> r,
                     double sigma2) {
  require_len(terms.size(), r.size(), "dinkelbach_t");
  RVector t(terms.size(), 0.0);
  for (std::size_t m = 0; m < terms.size(); ++m) {
    const double den = total(terms[m], sigma2);
    if (den > 0.0) t[m] = (1.0 + r[m]) * terms[m].signal / den;
  }
  return t;
}

RVector dinkelbach_t(const Beamformer& w, const RisPhase& ris, std::span<const double> r,
                     const ChannelSet& ch, const PowerConfig& power) {
  return dinkelbach_t(terms_at(w, ris, ch, power), r, power.sigma2);
}

RVector dinkelbach_terms(const std::vector<DlTerms>& terms, std::span<const double> r,
                         std::span<const double> t, double sigma2) {
  require_len(terms.size(), r.size(), "dinkelbach_terms");
  require_len(terms.size(), t.size(), "dinkelbach_terms");
  RVector out(terms.size());
  for (std::size_t m = 0; m < terms.size(); ++m)
    out[m] = (1.0 + r[m]) * terms[m].signal - t[m] * total(terms[m], sigma2);
  return out;
}

double dinkelbach_objective(const std::vector<DlTerms>& terms, std::span<const double> r,
                            std::span<const double> t, double sigma2) {
  double s = 0.0;
  for (double v : dinkelbach_terms(terms, r, t, sigma2)) s += v;
  return s;
}

double threshold_from_rate(double t_th_u) { return std::exp2(t_th_u) - 1.0; }

double threshold_from_db(double gamma_db) { return std::pow(10.0, gamma_db / 10.0); }

double rate_from_db(double gamma_db) { return std::log2(1.0 + threshold_from_db(gamma_db)); }

double qos_budget(double ul_signal, double t_bar, double sigma2_u) {
  if (!(t_bar > 0.0)) throw std::invalid_argument("qos_budget: threshold must be positive");
  return (ul_signal - t_bar * sigma2_u) / t_bar;
}

double qos_budget(const RisPhase& ris, const ChannelSet& ch, const PowerConfig& power,
                  double t_th_u) {
  if (!(t_th_u > 0.0)) throw std::invalid_argument("qos_budget: t_th_U must be positive");
  const EffectiveChannels eff = effective_channels(ch, ris);
  const double f = eff.ul.frobenius_norm();
  return qos_budget(power.p_u * f * f, threshold_from_rate(t_th_u), power.sigma2_u);
}

}  // namespace risfd
