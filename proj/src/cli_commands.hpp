#pragma once

#include <cstdint>
#include <string>

namespace ringmag::cli {

struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  std::uint64_t seed = 0;             // 0 keeps per-module defaults
  std::string cross_term = "oracle";  // oracle | printed
};

// Exit codes: 0 pass, 1 usage or config error, 2 numerical failure,
// 3 acceptance-check failure.
int cmd_couplings(const RunOptions& opt);
int cmd_oracle_check(const RunOptions& opt);
int cmd_phase_scan(const RunOptions& opt);
int cmd_spectrum(const RunOptions& opt);

}  // namespace ringmag::cli
