#include "risfd/system_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace risfd {
namespace {

// diag(v) * B without materializing the diagonal.
CMatrix scale_rows(std::span<const cplx> v, const CMatrix& b) {
  CMatrix out = b;
  for (std::size_t r = 0; r < b.rows(); ++r)
    for (auto& z : out.row(r)) z *= v[r];
  return out;
}

void require_ris(const ChannelSet& ch, const RisPhase& ris) {
  if (ris.size() != ch.D1.rows())
    throw DimensionError("RIS phase vector has " + std::to_string(ris.size()) +
                         " entries, channels have K = " + std::to_string(ch.D1.rows()));
}

void require_beams(const EffectiveChannels& eff, const Beamformer& w) {
  if (w.n_t() != eff.dl.cols() || w.users() != eff.dl.rows())
    throw DimensionError("beamformer shape does not match N_t x M");
}

}  // namespace

void PowerConfig::validate() const {
  if (!(p_d > 0.0) || !(p_u > 0.0) || !(p_max > 0.0) || !(sigma2 > 0.0) || !(sigma2_u > 0.0))
    throw std::invalid_argument("PowerConfig: all powers must be positive");
}

double Beamformer::power() const { return W.frobenius_norm() * W.frobenius_norm(); }

CVector Beamformer::stacked() const {
  CVector x;
  x.reserve(W.rows() * W.cols());
  for (std::size_t m = 0; m < W.cols(); ++m)
    for (std::size_t t = 0; t < W.rows(); ++t) x.push_back(W(t, m));
  return x;
}

Beamformer Beamformer::from_stacked(std::span<const cplx> x, std::size_t n_t, std::size_t m) {
  if (x.size() != n_t * m) throw DimensionError("from_stacked: length mismatch");
  CMatrix w(n_t, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t t = 0; t < n_t; ++t) w(t, j) = x[j * n_t + t];
  return Beamformer(std::move(w));
}

CVector RisPhase::unit() const {
  CVector v(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) v[k] = std::polar(1.0, theta[k]);
  return v;
}

CVector RisPhase::reflection() const {
  CVector v(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) v[k] = std::polar(beta, theta[k]);
  return v;
}

RisPhase RisPhase::from_unit(std::span<const cplx> v, double beta) {
  RisPhase r;
  r.beta = beta;
  r.theta.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    double a = std::arg(v[k]);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    r.theta[k] = a;
  }
  return r;
}

CVector AffineThetaMap::eval(std::span<const cplx> v) const {
  CVector out = base;
  if (gain.cols() > 0) {
    const CVector g = gain * v;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += g[i];
  }
  return out;
}

AffineThetaMap cascade_affine(const CMatrix& X, const CMatrix& A, const CMatrix& B,
                              std::span<const cplx> v, double beta) {
  if (X.cols() != v.size() || B.cols() != v.size() || A.rows() != X.rows() ||
      A.cols() != B.rows())
    throw DimensionError("cascade_affine: non-conformal dimensions");
  AffineThetaMap map;
  map.base = X * v;
  CVector bv = B * v;
  for (auto& z : bv) z *= beta;
  map.gain = A;
  for (std::size_t r = 0; r < A.rows(); ++r) {
    auto row = map.gain.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] *= bv[k];
  }
  return map;
}

EffectiveChannels effective_channels(const ChannelSet& ch, const RisPhase& ris) {
  require_ris(ch, ris);
  const CVector refl = ris.reflection();
  EffectiveChannels eff;
  if (refl.empty()) {
    eff.dl = ch.D;
    eff.cci = ch.V;
    eff.ul = ch.U;
    eff.si = ch.S;
  } else {
    const CMatrix td1 = scale_rows(refl, ch.D1);
    const CMatrix tu1 = scale_rows(refl, ch.U1);
    eff.dl = ch.D + ch.D2 * td1;
    eff.cci = ch.V + ch.D2 * tu1;
    eff.ul = ch.U + ch.U2 * tu1;
    eff.si = ch.S + ch.U2 * td1;
  }
  return eff;
}

std::vector<DlTerms> dl_terms(const EffectiveChannels& eff, const Beamformer& w,
                              const PowerConfig& power) {
  require_beams(eff, w);
  const std::size_t m_count = eff.dl.rows();
  // G(m, m') = d_m w_m'
  const CMatrix g = eff.dl * w.W;
  std::vector<DlTerms> out(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    double inter = 0.0;
    for (std::size_t j = 0; j < m_count; ++j)
      if (j != m) inter += std::norm(g(m, j));
    out[m].signal = power.p_d * std::norm(g(m, m));
    out[m].interference = power.p_d * inter;
    out[m].cci = power.p_u * norm2(eff.cci.row(m));
  }
  return out;
}

UlTerms ul_terms(const EffectiveChannels& eff, const Beamformer& w, const PowerConfig& power) {
  require_beams(eff, w);
  UlTerms t;
  const double f = eff.ul.frobenius_norm();
  t.signal = power.p_u * f * f;
  const double s = (eff.si * w.W).frobenius_norm();
  t.interference = power.p_d * s * s;
  return t;
}

double sinr(const DlTerms& t, double sigma2) {
  return t.signal / (t.interference + t.cci + sigma2);
}

double dl_sinr(std::size_t m, const Beamformer& w, const RisPhase& ris, const ChannelSet& ch,
               const PowerConfig& power) {
  const auto terms = dl_terms(effective_channels(ch, ris), w, power);
  if (m >= terms.size()) throw std::out_of_range("dl_sinr: user index");
  return sinr(terms[m], power.sigma2);
}

double ul_aggregate_sinr(const Beamformer& w, const RisPhase& ris, const ChannelSet& ch,
                         const PowerConfig& power) {
  const UlTerms t = ul_terms(effective_channels(ch, ris), w, power);
  return t.signal / (t.interference + power.sigma2_u);
}

double rate(double s) { return std::log2(1.0 + std::max(s, 0.0)); }

double RateReport::dl_sum() const {
  double s = 0.0;
  for (double r : dl_rate) s += r;
  return s;
}

double RateReport::ul_ue_sum() const {
  double s = 0.0;
  for (double r : ul_ue_rate) s += r;
  return s;
}

std::string RateReport::csv_header(std::size_t m, std::size_t n) {
  std::ostringstream os;
  os << "drop";
  for (std::size_t i = 0; i < m; ++i) os << ",dl_rate_" << i;
  for (std::size_t i = 0; i < n; ++i) os << ",ul_rate_" << i;
  os << ",dl_sum,ul_aggregate,ul_ue_sum";
  return os.str();
}

std::string RateReport::csv_row(std::uint64_t drop_id) const {
  std::ostringstream os;
  os.precision(10);
  os << drop_id;
  for (double r : dl_rate) os << ',' << r;
  for (double r : ul_ue_rate) os << ',' << r;
  os << ',' << dl_sum() << ',' << ul_rate << ',' << ul_ue_sum();
  return os.str();
}

RateReport rates(const Beamformer& w, const RisPhase& ris, const ChannelSet& ch,
                 const PowerConfig& power) {
  const EffectiveChannels eff = effective_channels(ch, ris);
  RateReport rep;
  for (const auto& t : dl_terms(eff, w, power)) {
    rep.dl_sinr.push_back(sinr(t, power.sigma2));
    rep.dl_rate.push_back(rate(rep.dl_sinr.back()));
  }
  const UlTerms ul = ul_terms(eff, w, power);
  const std::size_t n = eff.ul.cols();
  if (n > 0) {
    rep.ul_sinr = ul.signal / (ul.interference + power.sigma2_u);
    rep.ul_rate = rate(rep.ul_sinr);
  }

  // MRC: combine with h_n, the effective channel of UL UE n.
  const CMatrix hh = gram(eff.ul);  // (h_a^H h_b)
  const CMatrix sw = eff.si * w.W;  // N_r x M residual SI per DL stream
  for (std::size_t i = 0; i < n; ++i) {
    const CVector h = eff.ul.col(i);
    const double gain = hh(i, i).real();
    double inter = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) inter += power.p_u * std::norm(hh(i, j));
    for (std::size_t m = 0; m < sw.cols(); ++m) inter += power.p_d * std::norm(dotc(h, sw.col(m)));
    const double s = gain > 0.0 ? power.p_u * gain * gain / (inter + power.sigma2_u * gain) : 0.0;
    rep.ul_ue_sinr.push_back(s);
    rep.ul_ue_rate.push_back(rate(s));
  }
  return rep;
}

}  // namespace risfd
