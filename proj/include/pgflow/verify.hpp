// Full verification suite: every acceptance check, grouped by criterion id.
#pragma once

#include "pgflow/run.hpp"

namespace pgflow {

// Runs the checks whose names contain `filter` (all when empty). Check names
// are prefixed c01..c13 by criterion.
RunReport run_verify(const std::string& filter = "");

// One summary line per criterion id present in the report.
std::vector<std::string> verify_summary_lines(const RunReport& rep);

}  // namespace pgflow
