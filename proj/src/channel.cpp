#include "risfd/channel.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace risfd {
namespace {

using json = nlohmann::json;

// Stream identifiers for generate_drop.
enum Stream : std::uint64_t {
  kPlacementDl = 1,
  kPlacementUl = 2,
  kLinkU = 11,
  kLinkU1 = 12,
  kLinkU2 = 13,
  kLinkD = 14,
  kLinkD1 = 15,
  kLinkD2 = 16,
  kLinkS = 17,
  kLinkV = 18,
};

// Array boresights: the BS faces the UE cluster (+x), the RIS faces the
// BS-UE line (-y).
constexpr double kBsBoresight = 0.0;
constexpr double kRisBoresight = -std::numbers::pi / 2.0;

double angle_from(Point from, Point to, double boresight) {
  return std::atan2(to.y - from.y, to.x - from.x) - boresight;
}

// Block of a Rician link whose LoS component is the (row_offset.., col_offset..)
// window of a_rx a_tx^H.
CMatrix draw_block(std::size_t rows, std::size_t cols, std::size_t row_offset,
                   std::size_t col_offset, double gain, double rho, std::mt19937_64& rng,
                   LinkAngles angles) {
  if (gain < 0.0 || !std::isfinite(gain)) throw std::invalid_argument("draw_rician: bad gain");
  if (rho < 0.0) throw std::invalid_argument("draw_rician: rho must be >= 0");
  const bool pure_los = std::isinf(rho);
  const double w_los = pure_los ? 1.0 : std::sqrt(rho / (1.0 + rho));
  const double w_nlos = pure_los ? 0.0 : std::sqrt(1.0 / (1.0 + rho));
  const double amp = std::sqrt(gain);
  const double s_rx = std::sin(angles.arrival);
  const double s_tx = std::sin(angles.departure);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix h(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double phase = std::numbers::pi * (static_cast<double>(r + row_offset) * s_rx -
                                               static_cast<double>(c + col_offset) * s_tx);
      cplx v = w_los * std::polar(1.0, phase);
      if (!pure_los) {
        const double re = normal(rng);
        const double im = normal(rng);
        v += w_nlos * cplx(re, im);
      }
      h(r, c) = amp * v;
    }
  }
  return h;
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t link, std::uint64_t a,
                           std::uint64_t b = 0) {
  return std::mt19937_64(derive_seed(derive_seed(derive_seed(seed, link), a), b));
}

json matrix_to_json(const CMatrix& m) {
  json data = json::array();
  for (const auto& z : m.data()) data.push_back({z.real(), z.imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto& data = j.at("data");
  if (data.size() != rows * cols) throw DimensionError("channel JSON: entry count mismatch");
  std::vector<cplx> v;
  v.reserve(data.size());
  for (const auto& e : data) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("channel JSON: expected [re, im]");
    v.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return CMatrix(rows, cols, std::move(v));
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void ScenarioGeometry::validate() const {
  if (!(d > 0.0) || !(d_h > 0.0) || !(d_v > 0.0) || !(user_radius > 0.0))
    throw std::invalid_argument("ScenarioGeometry: all distances must be positive");
}

void RicianParams::validate() const {
  if (!(rho >= 0.0)) throw std::invalid_argument("RicianParams: rho must be >= 0");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("RicianParams: beta must lie in [0, 1]");
  if (!(min_distance > 0.0))
    throw std::invalid_argument("RicianParams: min_distance must be positive");
}

void Sizes::validate() const {
  if (n_t == 0 || n_r == 0 || m == 0)
    throw std::invalid_argument("Sizes: N_t, N_r and M must be positive");
}

Sizes ChannelSet::sizes() const {
  return Sizes{D.cols(), U.rows(), D1.rows(), D.rows(), U.cols()};
}

void ChannelSet::validate() const {
  const Sizes s = sizes();
  auto expect = [](const CMatrix& m, std::size_t r, std::size_t c, const char* name) {
    if (m.rows() != r || m.cols() != c)
      throw DimensionError(std::string("ChannelSet: ") + name + " has shape " +
                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                           ", expected " + std::to_string(r) + "x" + std::to_string(c));
    if (!m.all_finite()) throw DimensionError(std::string("ChannelSet: ") + name + " is not finite");
  };
  expect(U, s.n_r, s.n, "U");
  expect(U1, s.k, s.n, "U1");
  expect(U2, s.n_r, s.k, "U2");
  expect(D, s.m, s.n_t, "D");
  expect(D1, s.k, s.n_t, "D1");
  expect(D2, s.m, s.k, "D2");
  expect(S, s.n_r, s.n_t, "S");
  expect(V, s.m, s.n, "V");
}

ChannelSet ChannelSet::without_ris() const {
  ChannelSet out = *this;
  const Sizes s = sizes();
  out.U1 = CMatrix(0, s.n);
  out.U2 = CMatrix(s.n_r, 0);
  out.D1 = CMatrix(0, s.n_t);
  out.D2 = CMatrix(s.m, 0);
  return out;
}

double pathloss_db(double dist, const RicianParams& params) {
  if (!(dist > 0.0)) throw std::invalid_argument("pathloss: distance must be positive");
  return params.pl_intercept_db + params.pl_slope_db * std::log10(dist);
}

double pathloss_linear(double dist, const RicianParams& params) {
  return std::pow(10.0, -pathloss_db(dist, params) / 10.0);
}

double link_gain(double dist, const RicianParams& params) {
  const double db = pathloss_db(std::max(dist, params.min_distance), params);
  return std::pow(10.0, (params.convention == PathlossConvention::AsPrinted ? db : -db) / 10.0);
}

double si_gain(const RicianParams& params) {
  const double db = params.si_isolation_db;
  return std::pow(10.0, (params.convention == PathlossConvention::AsPrinted ? db : -db) / 10.0);
}

CVector ula_steering(std::size_t n, double angle) {
  CVector a(n);
  const double s = std::sin(angle);
  for (std::size_t k = 0; k < n; ++k)
    a[k] = std::polar(1.0, std::numbers::pi * static_cast<double>(k) * s);
  return a;
}

CMatrix draw_rician(std::size_t rows, std::size_t cols, double gain, double rho,
                    std::mt19937_64& rng, LinkAngles angles) {
  return draw_block(rows, cols, 0, 0, gain, rho, rng, angles);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Placement place_users(const ScenarioGeometry& geometry, const Sizes& sizes,
                      std::uint64_t seed) {
  geometry.validate();
  const Point center = geometry.cluster_center();
  const double r = geometry.user_radius;
  auto draw = [&](std::uint64_t stream, std::size_t idx) {
    std::mt19937_64 rng(derive_seed(derive_seed(seed, stream), idx));
    std::uniform_real_distribution<double> u(-r, r);
    for (;;) {
      const double x = u(rng), y = u(rng);
      if (x * x + y * y <= r * r) return Point{center.x + x, center.y + y};
    }
  };
  Placement p;
  for (std::size_t m = 0; m < sizes.m; ++m) p.dl_ue.push_back(draw(kPlacementDl, m));
  for (std::size_t n = 0; n < sizes.n; ++n) p.ul_ue.push_back(draw(kPlacementUl, n));
  return p;
}

ChannelSet generate_drop(const ScenarioGeometry& geometry, const Sizes& sizes,
                         const RicianParams& params, std::uint64_t seed) {
  return generate_drop(geometry, place_users(geometry, sizes, seed), sizes, params, seed);
}

ChannelSet generate_drop(const ScenarioGeometry& geometry, const Placement& placement,
                         const Sizes& sizes, const RicianParams& params,
                         std::uint64_t seed) {
  geometry.validate();
  params.validate();
  sizes.validate();
  if (placement.dl_ue.size() != sizes.m || placement.ul_ue.size() != sizes.n)
    throw DimensionError("generate_drop: placement does not match sizes");

  const Point bs = geometry.bs();
  const Point ris = geometry.ris();
  auto gain = [&](Point a, Point b) { return link_gain(distance(a, b), params); };
  const double rho = params.rho;

  ChannelSet ch;
  ch.U = CMatrix(sizes.n_r, sizes.n);
  ch.U1 = CMatrix(sizes.k, sizes.n);
  ch.U2 = CMatrix(sizes.n_r, sizes.k);
  ch.D = CMatrix(sizes.m, sizes.n_t);
  ch.D1 = CMatrix(sizes.k, sizes.n_t);
  ch.D2 = CMatrix(sizes.m, sizes.k);
  ch.V = CMatrix(sizes.m, sizes.n);

  // UL UE -> BS and UL UE -> RIS, one column per UE (and per RIS element).
  for (std::size_t n = 0; n < sizes.n; ++n) {
    const Point ue = placement.ul_ue[n];
    auto rng = stream_rng(seed, kLinkU, n);
    const CMatrix col = draw_block(sizes.n_r, 1, 0, 0, gain(ue, bs), rho, rng,
                                   {angle_from(bs, ue, kBsBoresight), 0.0});
    for (std::size_t r = 0; r < sizes.n_r; ++r) ch.U(r, n) = col(r, 0);
    for (std::size_t k = 0; k < sizes.k; ++k) {
      auto rk = stream_rng(seed, kLinkU1, n, k);
      ch.U1(k, n) = draw_block(1, 1, k, 0, gain(ue, ris), rho, rk,
                               {angle_from(ris, ue, kRisBoresight), 0.0})(0, 0);
    }
  }

  // RIS <-> BS, one RIS element per stream so that K-element surfaces nest.
  const double g_bs_ris = gain(bs, ris);
  const LinkAngles ris_to_bs{angle_from(bs, ris, kBsBoresight),
                             angle_from(ris, bs, kRisBoresight)};
  const LinkAngles bs_to_ris{ris_to_bs.departure, ris_to_bs.arrival};
  for (std::size_t k = 0; k < sizes.k; ++k) {
    auto r2 = stream_rng(seed, kLinkU2, k);
    const CMatrix c = draw_block(sizes.n_r, 1, 0, k, g_bs_ris, rho, r2, ris_to_bs);
    for (std::size_t r = 0; r < sizes.n_r; ++r) ch.U2(r, k) = c(r, 0);
    auto r1 = stream_rng(seed, kLinkD1, k);
    const CMatrix row = draw_block(1, sizes.n_t, k, 0, g_bs_ris, rho, r1, bs_to_ris);
    for (std::size_t t = 0; t < sizes.n_t; ++t) ch.D1(k, t) = row(0, t);
  }

  // BS -> DL UE and RIS -> DL UE.
  for (std::size_t m = 0; m < sizes.m; ++m) {
    const Point ue = placement.dl_ue[m];
    auto rng = stream_rng(seed, kLinkD, m);
    const CMatrix row = draw_block(1, sizes.n_t, 0, 0, gain(bs, ue), rho, rng,
                                   {0.0, angle_from(bs, ue, kBsBoresight)});
    for (std::size_t t = 0; t < sizes.n_t; ++t) ch.D(m, t) = row(0, t);
    for (std::size_t k = 0; k < sizes.k; ++k) {
      auto rk = stream_rng(seed, kLinkD2, m, k);
      ch.D2(m, k) = draw_block(1, 1, 0, k, gain(ris, ue), rho, rk,
                               {0.0, angle_from(ris, ue, kRisBoresight)})(0, 0);
    }
    for (std::size_t n = 0; n < sizes.n; ++n) {
      auto rv = stream_rng(seed, kLinkV, m, n);
      ch.V(m, n) = draw_block(1, 1, 0, 0, gain(placement.ul_ue[n], ue), rho, rv, {})(0, 0);
    }
  }

  auto rs = stream_rng(seed, kLinkS, 0);
  ch.S = draw_block(sizes.n_r, sizes.n_t, 0, 0, si_gain(params), rho, rs, {});
  ch.validate();
  return ch;
}

std::string channels_to_json(const ChannelSet& ch) {
  const Sizes s = ch.sizes();
  json j;
  j["sizes"] = {{"n_t", s.n_t}, {"n_r", s.n_r}, {"k", s.k}, {"m", s.m}, {"n", s.n}};
  j["U"] = matrix_to_json(ch.U);
  j["U1"] = matrix_to_json(ch.U1);
  j["U2"] = matrix_to_json(ch.U2);
  j["D"] = matrix_to_json(ch.D);
  j["D1"] = matrix_to_json(ch.D1);
  j["D2"] = matrix_to_json(ch.D2);
  j["S"] = matrix_to_json(ch.S);
  j["V"] = matrix_to_json(ch.V);
  return j.dump();
}

ChannelSet channels_from_json(const std::string& text) {
  const json j = json::parse(text);
  ChannelSet ch;
  ch.U = matrix_from_json(j.at("U"));
  ch.U1 = matrix_from_json(j.at("U1"));
  ch.U2 = matrix_from_json(j.at("U2"));
  ch.D = matrix_from_json(j.at("D"));
  ch.D1 = matrix_from_json(j.at("D1"));
  ch.D2 = matrix_from_json(j.at("D2"));
  ch.S = matrix_from_json(j.at("S"));
  ch.V = matrix_from_json(j.at("V"));
  ch.validate();
  return ch;
}

void save_channels(const ChannelSet& ch, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << channels_to_json(ch) << '\n';
}

ChannelSet load_channels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return channels_from_json(ss.str());
}

}  // namespace risfd
