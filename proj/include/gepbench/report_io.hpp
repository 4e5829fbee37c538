#pragma once

#include <filesystem>

#include "gepbench/harness.hpp"

namespace gepbench {

// Canonical report JSON (sorted keys, records in canonical order, wall clock
// excluded). Serializing a parsed report reproduces its bytes exactly.
std::string report_to_json_text(const RunReport& report);
RunReport report_from_json_text(const std::string& text);
RunReport load_report(const std::filesystem::path& path);

// Writes report.json, records.csv, summary.csv and the bench's SVG plots
// into dir. Identical reports produce byte-identical files.
std::vector<std::filesystem::path> emit_report(
    const RunReport& report, const std::filesystem::path& dir);

} // namespace gepbench
