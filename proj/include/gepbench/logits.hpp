#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gepbench/matrix.hpp"

namespace gepbench {

// Externally computed per-member logits, the bridge for scoring models
// trained outside this toolkit. The manifest is JSON:
//   {
//     "n_classes": 3,
//     "dataset": "free-text tag",
//     "members": ["member0.gepb", ...],   // GEPB1 files, n_samples x n_classes
//     "labels": "labels.gepb"             // optional, n_samples x 1
//   }
// Member paths are resolved relative to the manifest's directory.
struct LogitsBundle {
    std::vector<Matrix> member_logits;
    int n_classes = 0;
    std::string dataset_tag;
    std::optional<std::vector<int>> labels;

    std::size_t n_members() const { return member_logits.size(); }
    std::size_t n_samples() const {
        return member_logits.empty() ? 0 : member_logits[0].rows();
    }
};

LogitsBundle ingest_logits(const std::filesystem::path& manifest_path);

void write_logits_bundle(const std::vector<Matrix>& member_logits,
                         int n_classes, const std::string& dataset_tag,
                         const std::vector<int>* labels,
                         const std::filesystem::path& dir,
                         const std::string& manifest_name = "manifest.json");

} // namespace gepbench
