#pragma once
// Quick invariant suite run by `ris_fd_opt selftest`: rewrite identities,
// minorant and fidelity checks of both subproblems, and a solver oracle.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace risfd {

enum class Fault {
  None,
  OmegaSign,  // negate Omega_m in the beamforming data before the checks
};

struct SelftestCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest violation seen
  double tolerance = 0.0;
};

std::vector<SelftestCheck> run_selftest(Fault fault = Fault::None, std::uint64_t seed = 1,
                                        int trials = 20);
void print_selftest(const std::vector<SelftestCheck>& checks, std::ostream& os);
bool all_passed(const std::vector<SelftestCheck>& checks);

}  // namespace risfd
