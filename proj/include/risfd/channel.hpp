#pragma once
// Rician channel generation for one network drop.
//
// Geometry (2-D plane, meters): the BS sits at the origin, the RIS at
// (d, d_V), and the UE cluster is a disk of radius user_radius centered at
// (d_H, 0). Every link has power gain 10^(-PL_dB/10) with
// PL_dB = intercept + slope * log10(distance), except the BS self-interference
// channel S whose gain is set by a fixed isolation.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "risfd/linalg.hpp"

namespace risfd {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

struct ScenarioGeometry {
  double d = 80.0;             // BS-RIS horizontal distance
  double d_h = 200.0;          // BS-UE cluster horizontal distance
  double d_v = 50.0;           // BS-RIS perpendicular distance
  double user_radius = 50.0;

  void validate() const;
  Point bs() const { return {0.0, 0.0}; }
  Point ris() const { return {d, d_v}; }
  Point cluster_center() const { return {d_h, 0.0}; }
};

// How a link's pathloss turns into its power gain. Attenuation uses
// 10^(-PL_dB/10). AsPrinted uses the reciprocal, 10^(+PL_dB/10), which is the
// channel normalization sqrt(1/PL) with PL = 10^(-PL_dB/10) taken literally;
// it makes every link gain grow with distance and is kept for comparison.
enum class PathlossConvention { Attenuation, AsPrinted };

struct RicianParams {
  double rho = 3.0;               // Rician factor (LoS/NLoS power ratio)
  double pl_intercept_db = 38.88;
  double pl_slope_db = 22.0;      // per decade of distance
  double beta = 0.9;              // RIS reflection efficiency
  double si_isolation_db = 110.0; // gain of S is 10^(-isolation/10)
  double min_distance = 1.0;      // pathloss distances are clamped to this
  PathlossConvention convention = PathlossConvention::Attenuation;

  void validate() const;
};

struct Sizes {
  std::size_t n_t = 6;  // BS transmit antennas
  std::size_t n_r = 6;  // BS receive antennas
  std::size_t k = 16;   // RIS elements
  std::size_t m = 4;    // DL UEs
  std::size_t n = 4;    // UL UEs

  void validate() const;
};

// UE positions of one drop.
struct Placement {
  std::vector<Point> dl_ue;
  std::vector<Point> ul_ue;
};

struct ChannelSet {
  CMatrix U;   // N_r x N   UL UE -> BS
  CMatrix U1;  // K x N     UL UE -> RIS
  CMatrix U2;  // N_r x K   RIS -> BS
  CMatrix D;   // M x N_t   BS -> DL UE
  CMatrix D1;  // K x N_t   BS -> RIS
  CMatrix D2;  // M x K     RIS -> DL UE
  CMatrix S;   // N_r x N_t BS Tx -> BS Rx
  CMatrix V;   // M x N     UL UE -> DL UE

  Sizes sizes() const;
  // Throws DimensionError on inconsistent shapes or non-finite entries.
  void validate() const;
  // Same drop with the RIS removed (K = 0).
  ChannelSet without_ris() const;

  friend bool operator==(const ChannelSet&, const ChannelSet&) = default;
};

// Linear power gain 10^(-PL_dB/10) for PL_dB = 38.88 + 22 log10(distance).
double pathloss_db(double distance, const RicianParams& params = {});
double pathloss_linear(double distance, const RicianParams& params = {});
// Power gain of a link at this distance under params.convention.
double link_gain(double distance, const RicianParams& params);
// Power gain of S (isolation in place of pathloss) under params.convention.
double si_gain(const RicianParams& params);

// Half-wavelength ULA response exp(j pi k sin(angle)), k = 0..n-1.
CVector ula_steering(std::size_t n, double angle);

struct LinkAngles {
  double arrival = 0.0;    // at the receiving (row) array
  double departure = 0.0;  // at the transmitting (column) array
};

// sqrt(gain) (sqrt(rho/(1+rho)) H_LoS + sqrt(1/(1+rho)) H_NLoS) with
// H_LoS = a_rx(arrival) a_tx(departure)^H and unit-variance CN(0,1) NLoS.
// rho may be +infinity (pure LoS).
CMatrix draw_rician(std::size_t rows, std::size_t cols, double gain, double rho,
                    std::mt19937_64& rng, LinkAngles angles = {});

// Splits a master seed into independent stream seeds (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

Placement place_users(const ScenarioGeometry& geometry, const Sizes& sizes,
                      std::uint64_t seed);

// Every link uses its own RNG stream derived from `seed`, so the direct links
// of a drop do not change when K or the RIS position changes.
ChannelSet generate_drop(const ScenarioGeometry& geometry, const Sizes& sizes,
                         const RicianParams& params, std::uint64_t seed);
ChannelSet generate_drop(const ScenarioGeometry& geometry, const Placement& placement,
                         const Sizes& sizes, const RicianParams& params,
                         std::uint64_t seed);

// JSON: {"sizes": {...}, "U": {"rows": r, "cols": c, "data": [[re, im], ...]}, ...}
std::string channels_to_json(const ChannelSet& ch);
ChannelSet channels_from_json(const std::string& text);
void save_channels(const ChannelSet& ch, const std::filesystem::path& path);
ChannelSet load_channels(const std::filesystem::path& path);

}  // namespace risfd
