#pragma once

// End-to-end runs behind the CLI: certify -> transform -> solve -> lift ->
// verify, each producing a JSON report and an optional CSV value table.

#include <cstdint>
#include <optional>
#include <string>

#include "mdpr/model_file.hpp"

namespace mdpr {

enum class SolveMethod { PolicyIteration, ValueIteration };

struct RunOptions {
  std::optional<double> beta;  // default: minimum admissible
  double tol = 1e-10;
  std::optional<std::string> ell;  // overrides the model file
  std::uint64_t seed = 1;
  std::size_t oracle_cap = 1'000'000;
  bool compare_oracle = false;
  SolveMethod method = SolveMethod::PolicyIteration;
  std::string criterion = "total";  // oracle command: total | average
  std::size_t horizon = 100'000;
  std::size_t replications = 20;
};

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCertification = 1;
inline constexpr int kExitInput = 2;

struct RunResult {
  int exit_code = kExitOk;
  std::string report;  // JSON
  std::string csv;     // "state,value" table, empty when not applicable
};

/// Known commands: validate, certify-t, certify-ht, reduce-total,
/// reduce-average, solve, oracle, inventory-demo, remark1-demo.
/// `doc` may be null for the two demos (built-in fixtures are used).
/// Never throws: errors become a report with "error" set and exit code 2
/// (input) or 1 (certification).
RunResult run_command(const std::string& command, const ModelDocument* doc,
                      const RunOptions& opts);

bool is_known_command(const std::string& command);

/// CSV with header "state,value", values at 17 significant digits.
std::string value_csv(const FiniteMdp& m, std::span<const double> values);

}  // namespace mdpr
