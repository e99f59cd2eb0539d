#include <doctest.h>

#include "risfd/baselines.hpp"
#include "support.hpp"

using namespace risfd;
using namespace risfd::test;

namespace {

void zero_channels(ChannelSet& ch) {
  for (CMatrix* m : {&ch.U, &ch.U1, &ch.U2, &ch.D, &ch.D1, &ch.D2, &ch.S, &ch.V})
    *m = CMatrix(m->rows(), m->cols());
}

}  // namespace

TEST_CASE("MRT uses the full budget along the conjugate channels") {
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ChannelSet ch = drop(seed);
    PowerConfig pw = unit_power();
    pw.p_max = 2.5;
    const RisPhase th = random_phase(8, rng);
    const Beamformer w = mrt_beamformer(ch, th, pw);
    CHECK(w.power() == doctest::Approx(2.5).epsilon(1e-12));
    const EffectiveChannels eff = effective_channels(ch, th);
    const double s = std::abs(w.W(0, 0)) / std::abs(eff.dl(0, 0));
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t t = 0; t < 4; ++t)
        CHECK(std::abs(w.W(t, m) - s * std::conj(eff.dl(m, t))) <= 1e-12 * std::abs(w.W(t, m)) + 1e-300);
  }
}

TEST_CASE("MRT on zero channels gives zero beams") {
  ChannelSet ch = drop(2);
  zero_channels(ch);
  std::mt19937_64 rng(2);
  const Beamformer w = mrt_beamformer(ch, random_phase(8, rng), unit_power());
  CHECK(w.power() == 0.0);
}

TEST_CASE("single-user MRT attains the matched-filter SNR") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ChannelSet ch = drop(seed, small_sizes(4, 1, 0));
    std::mt19937_64 rng(seed);
    const PowerConfig pw = unit_power();
    const RisPhase th = random_phase(4, rng);
    const Beamformer w = mrt_beamformer(ch, th, pw);
    const double f = effective_channels(ch, th).dl.frobenius_norm();
    CHECK(dl_sinr(0, w, th, ch, pw) == doctest::Approx(pw.p_d * pw.p_max * f * f / pw.sigma2).epsilon(1e-12));
  }
}

TEST_CASE("MRC phases are zero for a real positive cascade") {
  ChannelSet ch = drop(3, small_sizes(1, 1, 1));
  for (auto& z : ch.D.data()) z = std::abs(z);
  for (auto& z : ch.D1.data()) z = std::abs(z);
  for (auto& z : ch.D2.data()) z = std::abs(z);
  const RisPhase p = mrc_ris_phases(ch, 0.9);
  REQUIRE(p.size() == 1);
  CHECK(std::abs(std::remainder(p.theta[0], 2.0 * std::numbers::pi)) <= 1e-12);
  CHECK(p.beta == 0.9);
}

TEST_CASE("MRC phases co-phase every path with the direct link") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ChannelSet ch = drop(seed, small_sizes(16));
    const RisPhase p = mrc_ris_phases(ch, 0.9);
    std::size_t best = 0;
    for (std::size_t m = 1; m < 3; ++m)
      if (norm2(ch.D.row(m)) > norm2(ch.D.row(best))) best = m;
    CVector w(4);
    const double n = std::sqrt(norm2(ch.D.row(best)));
    for (std::size_t t = 0; t < 4; ++t) w[t] = std::conj(ch.D(best, t)) / n;
    cplx direct = 0.0;
    for (std::size_t t = 0; t < 4; ++t) direct += ch.D(best, t) * w[t];
    const CVector d1w = ch.D1 * w;
    double mags = 0.0;
    cplx total = direct;
    for (std::size_t k = 0; k < 16; ++k) {
      const cplx path = 0.9 * ch.D2(best, k) * std::polar(1.0, p.theta[k]) * d1w[k];
      CHECK(std::abs(std::remainder(std::arg(path) - std::arg(direct), 2 * std::numbers::pi)) <= 1e-9);
      mags += std::abs(path);
      total += path;
    }
    CHECK(std::abs(total) == doctest::Approx(std::abs(direct) + mags).epsilon(1e-12));
  }
}

TEST_CASE("half duplex: accounting and interference-free slots") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ChannelSet ch = drop(seed);
    const PowerConfig pw = unit_power();
    std::mt19937_64 rng(seed);
    const RisPhase th = random_phase(8, rng);
    const HdRates hd = hd_rates(ch, th, pw);
    CHECK(hd.sum_rate == doctest::Approx(0.5 * (hd.dl_sum + hd.ul_rate)));
    const EffectiveChannels eff = effective_channels(ch, th);
    const double f = eff.ul.frobenius_norm();
    CHECK(hd.ul_slot.ul_sinr == doctest::Approx(pw.p_u * f * f / pw.sigma2_u).epsilon(1e-12));
    const Beamformer w = mrt_beamformer(ch, th, pw);
    const auto terms = dl_terms(eff, w, pw);
    for (std::size_t m = 0; m < 3; ++m) {
      const double want = terms[m].signal / (terms[m].interference + pw.sigma2);
      CHECK(hd.dl_slot.dl_sinr[m] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("half duplex on zero channels carries no rate") {
  ChannelSet ch = drop(4);
  zero_channels(ch);
  const HdRates hd = hd_rates(ch, RisPhase{RVector(8), 0.9}, unit_power());
  CHECK(hd.sum_rate == 0.0);
}

TEST_CASE("MRC reflection does not lower the single-user DL slot rate") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ChannelSet ch = drop(seed, small_sizes(16, 1, 2));
    const PowerConfig pw = unit_power();
    const double with = hd_rates(ch, mrc_ris_phases(ch, 0.9), pw).dl_sum;
    const double without = hd_rates(ch.without_ris(), RisPhase{{}, 0.9}, pw).dl_sum;
    CHECK(with >= without - 1e-12);
  }
}

TEST_CASE("FD schemes are the joint design with parts switched off") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const ChannelSet ch = drop(seed);
    const FrisConfig cfg;
    const FrisResult a = fd_no_ris(ch, PowerConfig{}, cfg, seed);
    const FrisResult b = run_fris(ch.without_ris(), PowerConfig{}, cfg, seed);
    CHECK(a.to_json() == b.to_json());

    const FrisResult r = random_phase_ris(ch, PowerConfig{}, cfg, seed);
    const FrisInit init = initialize(ch, noise_normalized(PowerConfig{}), cfg, seed);
    CHECK(r.theta.theta == init.theta.theta);
    for (const auto& h : r.history) CHECK(h.ris_iterations == 0);
  }
}

TEST_CASE("FD benchmark figure adds the UL aggregate to the DL sum") {
  RateReport r;
  r.dl_rate = {1.0, 2.0};
  r.ul_rate = 0.5;
  CHECK(fd_sum_rate(r) == doctest::Approx(3.5));
}
