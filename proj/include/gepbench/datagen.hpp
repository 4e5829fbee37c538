#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gepbench/dataset.hpp"
#include "gepbench/rng.hpp"

namespace gepbench {

// Counts derived from fractions always use round-half-away-from-zero
// (std::llround), the single rounding rule of this codebase.
long long round_count(double x);

struct SourceSpec {
    int n_classes = 4;
    std::size_t n_features = 8;
    std::size_t samples_per_class = 125;
    double cluster_separation = 3.2;
    double within_class_spread = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class ShiftKind { near, far };

struct ShiftSpec {
    ShiftKind kind = ShiftKind::near;
    double magnitude = 0.5; // near default 0.5, far default 2.0
    std::uint64_t seed = 0;

    void validate() const;
};

enum class CorruptionFamily {
    additive_noise,
    feature_blur,
    feature_dropout,
    affine_warp,
};

struct CorruptionSpec {
    CorruptionFamily family = CorruptionFamily::additive_noise;
    int severity = 1; // 1..5
    std::uint64_t seed = 0;

    void validate() const;
};

// Documented per-family scale, strictly increasing over severities 1..5.
double corruption_scale(CorruptionFamily family, int severity);

struct LabelNoiseSpec {
    double rate = 0.05;
    std::uint64_t seed = 0;

    void validate() const;
};

struct MeasurementNoiseSpec {
    double blur_sigma = 0.5;
    double additive_sigma = 0.07;
    std::uint64_t seed = 0;

    void validate() const;
};

struct UndersampleSpec {
    std::set<int> target_classes;
    double drop_fraction = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SlabSpec {
    std::size_t n_samples = 1000;
    double simple_feature_margin = 0.5;
    int n_slabs = 5; // >= 3
    double slab_noise = 0.02;
    bool shift_simple_feature = false;
    std::uint64_t seed = 0;

    void validate() const;
};

// Seeded class means used by make_source/make_target: each mean entry is
// gaussian * cluster_separation; the whole set is redrawn (up to 100 attempts)
// until all pairwise distances reach cluster_separation.
std::vector<std::vector<double>> class_means(const SourceSpec& spec);

// Gaussian class clusters, balanced, rows grouped by class in class order.
LabeledDataset make_source(const SourceSpec& spec);

// Same class structure as the source; each class mean is translated by a
// seeded random unit direction times magnitude and the per-coordinate std is
// scaled by sqrt(1 + magnitude/2) (covariance inflated by 1 + magnitude/2).
// Samples are fresh draws from shift.seed.
LabeledDataset make_target(const SourceSpec& source_spec,
                           const ShiftSpec& shift);

// Labels unchanged; feature perturbation per the documented family recipes.
LabeledDataset make_corrupted(const LabeledDataset& base,
                              const CorruptionSpec& spec);

// Flips exactly round(rate * n) labels, chosen without replacement; each new
// label is uniform over the other n_classes - 1 classes (a flip always
// changes the label).
LabeledDataset inject_label_noise(const LabeledDataset& base,
                                  const LabelNoiseSpec& spec);

// Per-row 1-D gaussian smoothing along the feature axis (kernel truncated at
// |offset| <= 3*blur_sigma, renormalized over in-bounds taps), then i.i.d.
// additive gaussian noise of std additive_sigma. Blur first, then noise.
LabeledDataset inject_measurement_noise(const LabeledDataset& base,
                                        const MeasurementNoiseSpec& spec);

// Removes exactly round(drop_fraction * n_c) rows from each target class,
// uniformly without replacement; survivors keep their original order.
LabeledDataset undersample(const LabeledDataset& base,
                           const UndersampleSpec& spec);

// Two-feature binary dataset. Coordinate 0 is sign-separable with the given
// margin (or replaced by label-independent uniform noise when
// shift_simple_feature is set); coordinate 1 encodes the label through an
// alternating-slab pattern over [-1, 1] that survives the shift.
LabeledDataset make_slab(const SlabSpec& spec);

// Class-stratified disjoint split; parts keep original row order.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& base,
                                                double train_fraction,
                                                double val_fraction,
                                                std::uint64_t seed);

// Replaces column `col` by a seeded permutation of itself (breaks any
// label correlation while preserving the marginal distribution).
LabeledDataset scramble_feature(const LabeledDataset& base, std::size_t col,
                                std::uint64_t seed);

std::string to_string(CorruptionFamily family);
std::string to_string(ShiftKind kind);

} // namespace gepbench
