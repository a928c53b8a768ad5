#pragma once

#include <string>
#include <vector>

#include "polaremit/config.hpp"

namespace polaremit {

struct RunResult {
    int exit_code = 0;                      // 0 ok, 1 compute/validation failure, 2 config failure
    std::vector<std::string> files_written;
};

/// Numeric CSV cell: decimal, 12 significant digits, locale independent.
std::string format_double(double v);

RunResult run_spectrum(const RunConfig& config);
RunResult run_sweep(const RunConfig& config);
RunResult run_validate(const RunConfig& config);
RunResult run_steady(const RunConfig& config);

/// Dispatch on config.mode.
RunResult run(const RunConfig& config);

}  // namespace polaremit
