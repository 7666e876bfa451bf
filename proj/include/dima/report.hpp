#pragma once

#include <string>

#include "dima/composer.hpp"

namespace dima {

// Fixed-width text rendering of an analysis report. Explored-state counts
// stand in for memory use; they are deterministic across runs.
std::string render_table(const AnalysisReport& report);

// One JSON record per line, starting with a versioned header, ending with the
// deduction record. Contracts, composed abstractions, and obligation checks
// cross-reference each other by id, forming the proof log.
std::string report_to_jsonl(const AnalysisReport& report);

// Inverse of report_to_jsonl for the serialized fields (raw trace states are
// not serialized, rendered trace lines are). Throws std::runtime_error on
// malformed or version-incompatible input.
AnalysisReport report_from_jsonl(const std::string& text);

}  // namespace dima
