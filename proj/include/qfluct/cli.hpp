#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfluct/sectors.hpp"

namespace qfluct::cli {

enum ExitCode : int {
  kOk = 0,
  kSelftestFailure = 1,
  kConfigError = 2,
  kSolverFailure = 3,
  kTruncationFailure = 4,
  kNumericalFailure = 5,
};

struct RunOptions {
  std::string out_dir = ".";
  int workers = 1;
  std::optional<double> tolerance;
  std::ostream* log = nullptr;  // summary lines; std::cout when null
};

int cmd_gap(const nlohmann::json& config, const RunOptions& options);
int cmd_converge(const nlohmann::json& config, const RunOptions& options);
int cmd_circle(const nlohmann::json& config, const RunOptions& options);
int cmd_junction(const nlohmann::json& config, const RunOptions& options);

struct SelftestOptions {
  double tolerance = 1e-10;
  /// Replaces the multiplicity formula in the dimension and Casimir checks;
  /// used to confirm that a broken formula is caught.
  std::function<std::uint64_t(int, HalfInteger)> multiplicity;
  std::ostream* log = nullptr;
};

int cmd_selftest(const SelftestOptions& options);

/// Full command line: parses arguments, dispatches, and turns exceptions
/// into exit codes.
int run(int argc, const char* const* argv);

}  // namespace qfluct::cli
