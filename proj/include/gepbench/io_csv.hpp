#pragma once

#include <filesystem>

#include "gepbench/dataset.hpp"
#include "gepbench/scoring.hpp"

namespace gepbench {

// Dataset CSV: header "f0,...,f{d-1},label", one row per sample. Floats are
// written with max_digits10 so values round-trip exactly.
void save_dataset_csv(const LabeledDataset& data,
                      const std::filesystem::path& path);

// n_classes is max(label) + 1 unless a larger value is supplied.
LabeledDataset load_dataset_csv(const std::filesystem::path& path,
                                int n_classes_hint = 0);

// Score CSV: header "sample_index,score".
void save_scores_csv(const ScoreVector& scores,
                     const std::filesystem::path& path);
std::vector<double> load_scores_csv(const std::filesystem::path& path);

// Scores as an n x 1 GEPB1 matrix.
void save_scores_gepb(const ScoreVector& scores,
                      const std::filesystem::path& path);
std::vector<double> load_scores_gepb(const std::filesystem::path& path);

} // namespace gepbench
