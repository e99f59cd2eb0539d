#pragma once
// Random instances shared by the unit tests.

#include <cmath>
#include <numbers>
#include <random>

#include "risfd/channel.hpp"
#include "risfd/fris.hpp"
#include "risfd/linalg.hpp"
#include "risfd/system_model.hpp"

namespace risfd::test {

inline CVector random_cvec(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  CVector v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

inline CMatrix random_cmatrix(std::size_t r, std::size_t c, std::mt19937_64& rng,
                              double sd = 1.0) {
  return CMatrix(r, c, random_cvec(r * c, rng, sd));
}

inline CMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  const CMatrix g = random_cmatrix(n, n, rng);
  CMatrix h = g + hermitian(g);
  return h * cplx(0.5);
}

inline RVector random_rvec(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  RVector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline Sizes small_sizes(std::size_t k = 8, std::size_t m = 3, std::size_t n = 2) {
  Sizes s;
  s.n_t = 4;
  s.n_r = 4;
  s.k = k;
  s.m = m;
  s.n = n;
  return s;
}

inline ChannelSet drop(std::uint64_t seed, const Sizes& sizes = small_sizes()) {
  return generate_drop(ScenarioGeometry{}, sizes, RicianParams{}, seed);
}

// Powers in noise units, so SINRs are O(1)-O(100) on the default geometry.
inline PowerConfig unit_power() { return noise_normalized(PowerConfig{}); }

inline Beamformer random_beams(std::size_t n_t, std::size_t m, double power, std::mt19937_64& rng) {
  CVector x = random_cvec(n_t * m, rng);
  const double s = std::sqrt(power / norm2(x));
  for (auto& z : x) z *= s;
  return Beamformer::from_stacked(x, n_t, m);
}

inline RisPhase random_phase(std::size_t k, std::mt19937_64& rng, double beta = 0.9) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  RisPhase p;
  p.beta = beta;
  p.theta.resize(k);
  for (auto& t : p.theta) t = u(rng);
  return p;
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    e = std::max(e, std::abs(a.data()[i] - b.data()[i]));
  return e;
}

}  // namespace risfd::test
