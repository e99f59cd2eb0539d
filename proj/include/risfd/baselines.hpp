#pragma once
// Reference schemes for benchmarking the joint design.

#include "risfd/fris.hpp"
#include "risfd/system_model.hpp"

namespace risfd {

// w_m proportional to the conjugate effective DL row of user m, one common
// scale so that sum ||w_m||^2 = P_max. Zero channels give zero beams.
Beamformer mrt_beamformer(const ChannelSet& ch, const RisPhase& ris, const PowerConfig& power);

// Phases that co-phase every RIS path of the DL UE with the strongest direct
// channel with that UE's direct path, under the beam D_m^H / ||D_m||.
RisPhase mrc_ris_phases(const ChannelSet& ch, double beta);

// Half-duplex operation with MRT beams for the given reflection: the DL slot
// sees no UL co-channel interference and the UL slot no self-interference.
struct HdRates {
  RateReport dl_slot;
  RateReport ul_slot;
  double dl_sum = 0.0;
  double ul_rate = 0.0;    // aggregate
  double sum_rate = 0.0;   // (dl_sum + ul_rate) / 2, time sharing
};
HdRates hd_rates(const ChannelSet& ch, const RisPhase& ris, const PowerConfig& power);

// The joint design with the RIS removed.
FrisResult fd_no_ris(const ChannelSet& ch, const PowerConfig& power, const FrisConfig& cfg,
                     std::uint64_t seed);

// The joint design with the random initial phases kept fixed.
FrisResult random_phase_ris(const ChannelSet& ch, const PowerConfig& power, FrisConfig cfg,
                            std::uint64_t seed);

// Full-duplex benchmark figure: DL sum rate plus aggregate UL rate.
double fd_sum_rate(const RateReport& r);

}  // namespace risfd
