#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gepbench/matrix.hpp"

namespace gepbench {

// Feature matrix plus integer labels; the unit every generator, injector and
// trainer consumes and produces. The provenance tag composes textually and
// records every transformation applied, in order.
struct LabeledDataset {
    Matrix features; // n_samples x n_features
    std::vector<int> labels;
    int n_classes = 0;
    std::string provenance;

    std::size_t n_samples() const { return features.rows(); }
    std::size_t n_features() const { return features.cols(); }

    void validate() const {
        if (features.rows() == 0)
            fail(ErrorKind::invalid_argument, "dataset is empty");
        if (labels.size() != features.rows())
            fail(ErrorKind::length_mismatch,
                 "labels length " + std::to_string(labels.size()) +
                     " != n_samples " + std::to_string(features.rows()));
        if (n_classes < 2)
            fail(ErrorKind::invalid_argument, "n_classes must be >= 2");
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] < 0 || labels[i] >= n_classes)
                fail(ErrorKind::label_out_of_range,
                     "label " + std::to_string(labels[i]) + " at row " +
                         std::to_string(i) + " outside [0, " +
                         std::to_string(n_classes) + ")");
        if (!features.all_finite())
            fail(ErrorKind::invalid_argument, "non-finite feature value");
    }
};

} // namespace gepbench
