#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixt/nfft.hpp"

namespace mixt {

struct SelftestOptions {
  std::uint64_t seed = 1;
  int instances = 40;  // random instances per suite
  NfftOptions nfft;
};

struct SuiteResult {
  std::string name;
  int cases = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Oracle suites: fast mixed transform vs direct sums (forward and adjoint),
/// adjoint pairing, dense factorization, grouped transform vs direct, LSQR on
/// consistent systems. Half of the transform instances force the windowed path.
std::vector<SuiteResult> run_selftest(const SelftestOptions& options = {});

}  // namespace mixt
