#pragma once

#include <string>

#include "alipmpc/simulator.hpp"

namespace alipmpc {

/// Columnar per-tick trace, one row per simulation tick. Formatting is
/// locale-free and fixed, so identical runs serialize byte-identically.
std::string trace_to_tsv(const SimTrace& trace);

/// Columnar per-step table (one row per touchdown).
std::string steps_to_tsv(const SimTrace& trace);

/// Structured run summary: terminal status, metrics, scenario echo. Wall
/// clock solve times are deliberately absent; see timing_to_json.
std::string summary_to_json(const SimResult& result);

/// Planner wall-clock statistics; the only output that varies across runs.
std::string timing_to_json(const Metrics& metrics);

std::string comparison_to_json(const ComparisonSummary& summary);
std::string comparison_to_text(const ComparisonSummary& summary);

/// Writes trace.tsv, steps.tsv, profile.json, summary.json, timing.json.
void write_run_outputs(const SimResult& result, const std::string& dir);

}  // namespace alipmpc
