#pragma once

#include <filesystem>

#include "gepbench/mlp.hpp"
#include "gepbench/scoring.hpp"

namespace gepbench {

// A model on disk is a directory: model.json (layer_dims, activation, file
// names) plus one GEPB1 file per weight matrix and per bias vector. Round
// trips are exact at binary32 precision.
void save_model(const MlpModel& model, const std::filesystem::path& dir);
MlpModel load_model(const std::filesystem::path& dir);

// An ensemble is a directory with ensemble.json naming member subdirectories.
void save_ensemble(const Ensemble& ensemble,
                   const std::filesystem::path& dir);
Ensemble load_ensemble(const std::filesystem::path& dir);

} // namespace gepbench
