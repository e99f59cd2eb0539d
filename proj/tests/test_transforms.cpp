#include <doctest.h>

#include "risfd/transforms.hpp"
#include "support.hpp"

using namespace risfd;
using namespace risfd::test;

namespace {

struct Instance {
  ChannelSet ch;
  PowerConfig pw;
  Beamformer w;
  RisPhase th;
};

Instance instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance in{drop(seed), unit_power(), {}, {}};
  in.w = random_beams(4, 3, in.pw.p_max, rng);
  in.th = random_phase(8, rng);
  return in;
}

double sum_rate(const Instance& in) {
  double s = 0.0;
  for (std::size_t m = 0; m < 3; ++m) s += rate(dl_sinr(m, in.w, in.th, in.ch, in.pw));
  return s;
}

}  // namespace

TEST_CASE("optimal r is the SINR") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance in = instance(seed);
    const RVector r = optimal_r(in.w, in.th, in.ch, in.pw);
    for (std::size_t m = 0; m < 3; ++m) CHECK(r[m] == dl_sinr(m, in.w, in.th, in.ch, in.pw));
  }
  CHECK(optimal_r({DlTerms{0.0, 1.0, 1.0}}, 1.0)[0] == 0.0);
}

TEST_CASE("single user at SINR 1") {
  const std::vector<DlTerms> t{{1.0, 0.0, 0.0}};
  const RVector r = optimal_r(t, 1.0);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(lagrangian_objective(t, r, 1.0) == doctest::Approx(1.0));
  CHECK(lagrangian_objective({DlTerms{}}, RVector{0.0}, 1.0) == 0.0);
}

TEST_CASE("Lagrangian form equals the sum rate at r = SINR") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance in = instance(seed);
    const RVector r = optimal_r(in.w, in.th, in.ch, in.pw);
    CHECK(std::abs(lagrangian_objective(in.w, in.th, r, in.ch, in.pw) - sum_rate(in)) <= 1e-9);
  }
}

TEST_CASE("Lagrangian form is stationary and concave in r") {
  const double h = 1e-5;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance in = instance(seed);
    const auto terms = dl_terms(effective_channels(in.ch, in.th), in.w, in.pw);
    const RVector r = optimal_r(terms, in.pw.sigma2);
    for (std::size_t m = 0; m < 3; ++m) {
      RVector up = r, dn = r;
      up[m] += h;
      dn[m] -= h;
      const double fu = lagrangian_objective(terms, up, in.pw.sigma2);
      const double fd = lagrangian_objective(terms, dn, in.pw.sigma2);
      const double f0 = lagrangian_objective(terms, r, in.pw.sigma2);
      CHECK(std::abs((fu - fd) / (2 * h)) <= 1e-6);
      CHECK(fu <= f0 + 1e-12);
      CHECK(fd <= f0 + 1e-12);
    }
  }
}

TEST_CASE("Dinkelbach ratios") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance in = instance(seed);
    const auto terms = dl_terms(effective_channels(in.ch, in.th), in.w, in.pw);
    const RVector r = optimal_r(terms, in.pw.sigma2);
    const RVector t = dinkelbach_t(terms, r, in.pw.sigma2);
    for (std::size_t m = 0; m < 3; ++m) {
      const auto& d = terms[m];
      const double den = d.signal + d.interference + d.cci + in.pw.sigma2;
      CHECK(t[m] >= 0.0);
      CHECK(t[m] * den == doctest::Approx((1.0 + r[m]) * d.signal).epsilon(1e-13));
    }
    for (double v : dinkelbach_terms(terms, r, t, in.pw.sigma2)) CHECK(std::abs(v) <= 1e-10);
    CHECK(dinkelbach_t(in.w, in.th, r, in.ch, in.pw) == t);
  }
  CHECK(dinkelbach_t({DlTerms{0.0, 2.0, 0.0}}, RVector{0.0}, 1.0)[0] == 0.0);
  CHECK(dinkelbach_t({DlTerms{}}, RVector{0.0}, 0.0)[0] == 0.0);  // zero denominator
}

TEST_CASE("Dinkelbach objective is positive exactly when the ratio improves") {
  const std::vector<DlTerms> anchor{{2.0, 1.0, 0.5}};
  const RVector r{1.0};
  const RVector t = dinkelbach_t(anchor, r, 0.5);
  const std::vector<DlTerms> better{{3.0, 1.0, 0.5}}, worse{{1.0, 1.0, 0.5}};
  CHECK(dinkelbach_objective(better, r, t, 0.5) > 0.0);
  CHECK(dinkelbach_objective(worse, r, t, 0.5) < 0.0);
}

TEST_CASE("QoS threshold and budget") {
  CHECK(threshold_from_rate(1.0) == doctest::Approx(1.0));
  CHECK(threshold_from_db(10.0) == doctest::Approx(10.0));
  CHECK(rate_from_db(5.0) == doctest::Approx(std::log2(1.0 + std::pow(10.0, 0.5))));
  CHECK(threshold_from_rate(rate_from_db(7.0)) == doctest::Approx(threshold_from_db(7.0)));
  CHECK(qos_budget(2.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(qos_budget(0.5, 1.0, 1.0) < 0.0);
}

TEST_CASE("budget form of the QoS is equivalent to the SINR form") {
  int both = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Instance in = instance(seed);
    const EffectiveChannels eff = effective_channels(in.ch, in.th);
    const UlTerms ul = ul_terms(eff, in.w, in.pw);
    const double sinr_u = ul_aggregate_sinr(in.w, in.th, in.ch, in.pw);
    // Thresholds around the achieved SINR exercise both outcomes.
    for (double f : {0.5, 0.999, 1.001, 2.0}) {
      const double t_bar = f * sinr_u;
      const double xi = qos_budget(in.th, in.ch, in.pw, std::log2(1.0 + t_bar));
      CHECK(xi == doctest::Approx(qos_budget(ul.signal, t_bar, in.pw.sigma2_u)).epsilon(1e-12));
      CHECK((ul.interference <= xi) == (sinr_u >= t_bar));
      both += ul.interference <= xi;
    }
  }
  CHECK(both == 200);
}

TEST_CASE("budget shrinks as the threshold grows") {
  const Instance in = instance(3);
  double prev = INFINITY;
  for (double t = 0.1; t < 8.0; t += 0.5) {
    const double xi = qos_budget(in.th, in.ch, in.pw, t);
    CHECK(xi < prev);
    prev = xi;
  }
}
