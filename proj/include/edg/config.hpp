#pragma once

#include <optional>
#include <string>
#include <vector>

namespace edg {

struct RunConfig {
  std::string problem = "swirl";
  int k = 0;
  std::string approach = "od"; // od | do | both
  std::vector<int> levels{8, 16, 32, 64};
  double gamma = 1.0;
  double tau1 = 1.0;
  std::optional<double> tau2_override; // commutativity-violation experiments
  std::string output;                  // report file; empty = stdout
  std::string format = "csv";          // csv | json
  std::string dump_matrices;           // directory; empty = off
  std::string dump_mesh;               // directory; empty = off
};

// Parse command-line style arguments (without argv[0]) plus an optional
// --config key=value file; flags override file values. Throws UsageError on
// unknown keys, unparsable values, or invariant violations (levels nonempty
// ascending and >= 1, gamma > 0, tau1 > 0, known problem/approach/format).
RunConfig parse_config(const std::vector<std::string>& args);

// Full driver: convergence study per config, report emission, dumps.
// Returns a process exit status; all errors are caught and mapped:
//   0 success        2 usage error          3 stabilization condition
//   4 factorization/condensation failure    5 I/O error
//   1 any other failure
int run_main(const RunConfig& config, std::ostream& out, std::ostream& err);

// argv entry point: parse (including --help) then run_main.
int cli_main(int argc, const char* const* argv);

} // namespace edg
