#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "npdetect/cli/config.hpp"

namespace npdetect::cli {

struct CsvRow {
  std::string metric;
  double value;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
};

struct CommandOutput {
  Json result;
  std::vector<CsvRow> rows;
  std::size_t n = 0;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
};

/// kl, membership, bounds, detect, simulate, spectral, inverse
const std::vector<std::string>& command_names();

/// Runs one subcommand on an already-loaded config. Throws ConfigError for
/// schema problems and npdetect::Error for math-domain failures.
CommandOutput run_command(std::string_view command, const Json& config);

/// Finite doubles as numbers; infinities and NaN as "inf", "-inf", "nan".
Json number_json(double value);

}  // namespace npdetect::cli
