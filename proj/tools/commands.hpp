#pragma once
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wncs::cli {

// Exit codes: 0 clean, 1 configuration/usage error, 2 simulation fault.
// All diagnostics go to err; out carries only the machine-parseable result.

struct RunArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
};
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);

struct SweepArgs {
  std::string config_path;
  std::string param_path;
  std::vector<double> values;
  std::string out_dir = "out";
};
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

struct CdfArgs {
  std::string trace_path;
  std::string out_path;
};
int cmd_cdf(const CdfArgs& args, std::ostream& out, std::ostream& err);

struct ValidateArgs {
  std::string config_path;
};
int cmd_validate(const ValidateArgs& args, std::ostream& out,
                 std::ostream& err);

}  // namespace wncs::cli
