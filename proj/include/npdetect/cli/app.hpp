#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace npdetect::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitMath = 3,
  kExitInternal = 4,
};

/// Entry point behind the npdetect binary. `args` excludes the program name.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// CSV header: command,config_hash,n,alpha,metric,value,ci_lo,ci_hi,seed
const char* csv_header() noexcept;

}  // namespace npdetect::cli
