#pragma once

#include <string>

namespace ecsim::cli {

struct VerifyOptions {
  bool inject_pbs_fault = false;  // swap the a-side beam splitter outputs
  std::string report_path;        // write the conservation report here if set
  std::uint64_t seed = 42;
};

/// Run the full invariant suite, printing one [PASS]/[FAIL] line per check.
/// Returns 0 when every check passes, 1 otherwise.
int run_verify(const VerifyOptions& options);

}  // namespace ecsim::cli
