#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chebybal/harness.hpp"

namespace chebybal {

// Fixed column order: tick, state, com_x..z, per-contact fx..tz in
// declaration order, radius, r_w, per-contact mu_mes/mu_filt, solve_time_us,
// max_violation. Numbers print with %.17g and a '.' decimal point.
//
// The solve_time_us column is written as 0 unless includeTiming is set:
// wall-clock readings would break the byte-identical-trace contract for
// reruns of the same seed. Aggregate timing always lives in the summary.
std::vector<std::string> traceColumns(const Scenario & scenario);

void writeTraceCsv(std::ostream & out, const Scenario & scenario, const RunResult & result,
                   bool includeTiming = false);

void writeTraceJson(std::ostream & out, const Scenario & scenario, const RunResult & result,
                    uint64_t seed, bool includeTiming = false);

std::string summaryText(const RunSummary & summary);

} // namespace chebybal
