#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace chung {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  exit_ok = 0,
  exit_verify_failed = 1,
  exit_config = 2,
  exit_numeric = 3,
  exit_precondition = 4,
  exit_problem_verification = 5,
};

struct GlobalOptions {
  std::string config;
  std::string out;  // output directory; empty writes to the out stream
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool skip_verify = false;
  std::optional<long> draws;
  std::optional<long> kmax;
  std::string method = "sgd";  // heatmap only
  long p_cells = 101;
  long theta_cells = 51;
  std::vector<std::string> positional;
};

// Each command returns its exit code. Errors are reported on `err` except
// precondition failures, which are emitted as JSON on `out`.
int cmd_simulate_recursion(const GlobalOptions& o, std::ostream& out, std::ostream& err);
int cmd_bound(const GlobalOptions& o, std::ostream& out, std::ostream& err);
int cmd_run(const GlobalOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const GlobalOptions& o, std::ostream& out, std::ostream& err);
int cmd_fit(const GlobalOptions& o, std::ostream& out, std::ostream& err);
int cmd_heatmap(const GlobalOptions& o, std::ostream& out, std::ostream& err);

/// Runs the named command and maps exceptions to exit codes.
int dispatch(const std::string& command, const GlobalOptions& o, std::ostream& out, std::ostream& err);

}  // namespace chung
