#pragma once

// Command implementations behind the CLI. Each returns a process exit code
// and writes CSV (with a '#' scenario header block) to `out`, diagnostics to
// `err`, so they are directly testable against string streams.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace lorasg::commands {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitOracle = 3;  // simulator and model disagree, |z| > 4
inline constexpr int kExitNumeric = 4;

struct NodesRange {
  double from = 0.0;
  double to = 0.0;
  double step = 0.0;
};
// "A:B:STEP" with A <= B, STEP > 0
NodesRange parse_nodes_range(const std::string& text);

struct AirtimeArgs {
  int sf = 0;  // 0 = all of 6..12
  double bw_hz = 125000.0;
  int n_preamble_extra = 6;
  int payload_bytes = 20;
  std::string header = "present";
  bool low_rate_opt = false;
  std::string cr = "4/5";
};

struct AnalyzeArgs {
  std::string config;  // empty = built-in defaults
  std::string nodes;   // optional "A:B:STEP" density sweep
};

struct EqualizeArgs {
  std::string config;
  double target_pi = 0.95;
  // adds the published reference column, runs both the infinite-plane and
  // finite-disk modes, and reports the qualitative checks
  bool compare_reference = false;
};

struct SimulateArgs {
  std::string config;
  std::optional<long> replications;
  std::optional<std::uint64_t> seed;
  std::string mode = "spatial";  // spatial | power
  std::optional<double> disk_truncation_m;
};

struct SweepArgs {
  std::string kind;  // figure2 | figure3 | figure4
  std::string config;
  std::string out_path;  // empty = stdout
};

struct ValidateArgs {
  std::string config;
  double window_s = 1.0;
  std::optional<long> replications;
  std::optional<std::uint64_t> seed;
};

int cmd_airtime(const AirtimeArgs& args, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_equalize(const EqualizeArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);

}  // namespace lorasg::commands
