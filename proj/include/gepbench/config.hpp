#pragma once

#include <filesystem>
#include <string>

#include "gepbench/harness.hpp"

namespace gepbench {

// Experiment config JSON schema is documented in docs/FORMATS.md. Parsing is
// strict: unknown keys are rejected so typos cannot silently fall back to
// defaults. Every key is optional; omitted keys take the defaults from
// ExperimentConfig.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Canonical (sorted-key) JSON text with every field spelled out; two configs
// that compare equal serialize byte-identically.
std::string config_to_json_text(const ExperimentConfig& cfg);

// CRC-32 (hex, lowercase, 8 digits) of the canonical JSON text.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace gepbench
