#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "lexdiv/engine.hpp"

namespace lexdiv {

enum class VerifyLevel { fast, full };

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

/// User-facing self-check. `fast` runs small-instance oracle comparisons;
/// `full` adds 1e5-trial distribution checks, drift tables and the bound check
/// on every generator family. `fault` corrupts the elite filter for the
/// selection-based checks (negative control). Each finished check is written
/// to `progress` if given.
VerifyReport run_verify(VerifyLevel level, FilterFault fault = FilterFault::none, std::ostream* progress = nullptr);

}  // namespace lexdiv
