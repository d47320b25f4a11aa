#pragma once

#include <map>
#include <string>

#include "era/replica.hpp"
#include "era/simnet.hpp"

namespace era {

/// Deterministic human-readable report of a run.
std::string format_report(const std::string& scenario_path, const Trace& trace);

/// Structured report, schema version 1.
std::string format_report_json(const std::string& scenario_path, const Trace& trace);

}  // namespace era
