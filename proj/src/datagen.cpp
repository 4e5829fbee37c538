#include "gepbench/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace gepbench {

long long round_count(double x) { return std::llround(x); }

void SourceSpec::validate() const {
    if (n_classes < 2) fail(ErrorKind::invalid_argument, "n_classes >= 2");
    if (n_features < 1) fail(ErrorKind::invalid_argument, "n_features >= 1");
    if (samples_per_class < 1)
        fail(ErrorKind::invalid_argument, "samples_per_class >= 1");
    if (!(cluster_separation > 0.0))
        fail(ErrorKind::invalid_argument, "cluster_separation > 0");
    if (!(within_class_spread >= 0.0))
        fail(ErrorKind::invalid_argument, "within_class_spread >= 0");
}

void ShiftSpec::validate() const {
    if (!(magnitude >= 0.0))
        fail(ErrorKind::invalid_argument, "shift magnitude >= 0");
}

void CorruptionSpec::validate() const {
    if (severity < 1 || severity > 5)
        fail(ErrorKind::invalid_argument,
             "severity " + std::to_string(severity) + " outside 1..5");
}

void LabelNoiseSpec::validate() const {
    if (!(rate >= 0.0 && rate <= 1.0))
        fail(ErrorKind::invalid_argument, "label noise rate in [0,1]");
}

void MeasurementNoiseSpec::validate() const {
    if (!(blur_sigma >= 0.0))
        fail(ErrorKind::invalid_argument, "blur_sigma >= 0");
    if (!(additive_sigma >= 0.0))
        fail(ErrorKind::invalid_argument, "additive_sigma >= 0");
}

void UndersampleSpec::validate() const {
    if (target_classes.empty())
        fail(ErrorKind::invalid_argument, "target_classes nonempty");
    if (!(drop_fraction >= 0.0 && drop_fraction <= 1.0))
        fail(ErrorKind::invalid_argument, "drop_fraction in [0,1]");
}

void SlabSpec::validate() const {
    if (n_samples < 1) fail(ErrorKind::invalid_argument, "n_samples >= 1");
    if (!(simple_feature_margin > 0.0))
        fail(ErrorKind::invalid_argument, "simple_feature_margin > 0");
    if (n_slabs < 3) fail(ErrorKind::invalid_argument, "n_slabs >= 3");
    if (!(slab_noise >= 0.0))
        fail(ErrorKind::invalid_argument, "slab_noise >= 0");
}

std::string to_string(CorruptionFamily family) {
    switch (family) {
        case CorruptionFamily::additive_noise: return "additive_noise";
        case CorruptionFamily::feature_blur: return "feature_blur";
        case CorruptionFamily::feature_dropout: return "feature_dropout";
        case CorruptionFamily::affine_warp: return "affine_warp";
    }
    fail(ErrorKind::invalid_argument, "unknown corruption family");
}

std::string to_string(ShiftKind kind) {
    return kind == ShiftKind::near ? "near" : "far";
}

double corruption_scale(CorruptionFamily family, int severity) {
    if (severity < 1 || severity > 5)
        fail(ErrorKind::invalid_argument, "severity outside 1..5");
    // Strictly increasing per family; units documented in docs/FORMATS.md.
    static constexpr double kAdditiveSigma[5] = {0.25, 0.5, 1.0, 2.0, 4.0};
    static constexpr double kBlurSigma[5] = {0.5, 1.0, 1.5, 2.0, 3.0};
    static constexpr double kDropoutProb[5] = {0.05, 0.1, 0.2, 0.35, 0.5};
    static constexpr double kWarpStrength[5] = {0.05, 0.1, 0.2, 0.35, 0.5};
    switch (family) {
        case CorruptionFamily::additive_noise: return kAdditiveSigma[severity - 1];
        case CorruptionFamily::feature_blur: return kBlurSigma[severity - 1];
        case CorruptionFamily::feature_dropout: return kDropoutProb[severity - 1];
        case CorruptionFamily::affine_warp: return kWarpStrength[severity - 1];
    }
    fail(ErrorKind::invalid_argument, "unknown corruption family");
}

std::vector<std::vector<double>> class_means(const SourceSpec& spec) {
    spec.validate();
    Rng rng = Rng(spec.seed).split(0); // stream 0: mean placement
    const int k = spec.n_classes;
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<std::vector<double>> means(k);
        for (int c = 0; c < k; ++c) {
            means[c].resize(spec.n_features);
            for (std::size_t j = 0; j < spec.n_features; ++j)
                means[c][j] = rng.gaussian() * spec.cluster_separation;
        }
        bool ok = true;
        for (int a = 0; a < k && ok; ++a)
            for (int b = a + 1; b < k && ok; ++b) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < spec.n_features; ++j) {
                    const double d = means[a][j] - means[b][j];
                    d2 += d * d;
                }
                ok = std::sqrt(d2) >= spec.cluster_separation;
            }
        if (ok) return means;
    }
    fail(ErrorKind::infeasible_spec,
         "class mean placement failed after 100 attempts (n_classes=" +
             std::to_string(k) + ", separation=" +
             std::to_string(spec.cluster_separation) + ")");
}

namespace {

// Samples one class block: mean + spread * gaussian, row-major draws.
void fill_class_block(Matrix& features, std::vector<int>& labels,
                      std::size_t row0, int label,
                      const std::vector<double>& mean, double spread,
                      std::size_t count, Rng& rng) {
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t r = row0 + s;
        labels[r] = label;
        for (std::size_t j = 0; j < features.cols(); ++j)
            features(r, j) = mean[j] + spread * rng.gaussian();
    }
}

} // namespace

LabeledDataset make_source(const SourceSpec& spec) {
    spec.validate();
    const auto means = class_means(spec);
    Rng rng = Rng(spec.seed).split(1); // stream 1: sample draws
    LabeledDataset out;
    out.n_classes = spec.n_classes;
    out.provenance = "source";
    const std::size_t n = spec.samples_per_class * spec.n_classes;
    out.features = Matrix(n, spec.n_features);
    out.labels.resize(n);
    for (int c = 0; c < spec.n_classes; ++c)
        fill_class_block(out.features, out.labels, c * spec.samples_per_class,
                         c, means[c], spec.within_class_spread,
                         spec.samples_per_class, rng);
    return out;
}

LabeledDataset make_target(const SourceSpec& source_spec,
                           const ShiftSpec& shift) {
    source_spec.validate();
    shift.validate();
    auto means = class_means(source_spec);

    Rng rng(shift.seed);
    // Draw order: one direction per class (class-ascending), then samples.
    for (int c = 0; c < source_spec.n_classes; ++c) {
        std::vector<double> dir(source_spec.n_features);
        double norm2 = 0.0;
        for (std::size_t j = 0; j < source_spec.n_features; ++j) {
            dir[j] = rng.gaussian();
            norm2 += dir[j] * dir[j];
        }
        if (shift.magnitude > 0.0 && norm2 > 0.0) {
            const double scale = shift.magnitude / std::sqrt(norm2);
            for (std::size_t j = 0; j < source_spec.n_features; ++j)
                means[c][j] += dir[j] * scale;
        }
    }
    const double spread =
        source_spec.within_class_spread * std::sqrt(1.0 + shift.magnitude / 2.0);

    LabeledDataset out;
    out.n_classes = source_spec.n_classes;
    out.provenance = "target:shift=" + to_string(shift.kind) + "(" +
                     std::to_string(shift.magnitude) + ")";
    const std::size_t n = source_spec.samples_per_class * source_spec.n_classes;
    out.features = Matrix(n, source_spec.n_features);
    out.labels.resize(n);
    for (int c = 0; c < source_spec.n_classes; ++c)
        fill_class_block(out.features, out.labels,
                         c * source_spec.samples_per_class, c, means[c], spread,
                         source_spec.samples_per_class, rng);
    return out;
}

LabeledDataset make_corrupted(const LabeledDataset& base,
                              const CorruptionSpec& spec) {
    base.validate();
    spec.validate();
    const double scale = corruption_scale(spec.family, spec.severity);
    LabeledDataset out = base;
    out.provenance = base.provenance + "+" + to_string(spec.family) +
                     "(sev=" + std::to_string(spec.severity) + ")";
    Rng rng(spec.seed);
    Matrix& x = out.features;
    const std::size_t rows = x.rows(), cols = x.cols();

    switch (spec.family) {
        case CorruptionFamily::additive_noise:
            // entry-wise gaussian, row-major draw order
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j)
                    x(i, j) += scale * rng.gaussian();
            break;
        case CorruptionFamily::feature_blur: {
            // 1-D smoothing along the feature axis, no randomness
            const auto r = static_cast<std::ptrdiff_t>(3.0 * scale);
            Matrix blurred(rows, cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) {
                    double num = 0.0, den = 0.0;
                    for (std::ptrdiff_t d = -r; d <= r; ++d) {
                        const std::ptrdiff_t jj =
                            static_cast<std::ptrdiff_t>(j) + d;
                        if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(cols))
                            continue;
                        const double w = std::exp(
                            -static_cast<double>(d * d) / (2.0 * scale * scale));
                        num += w * x(i, static_cast<std::size_t>(jj));
                        den += w;
                    }
                    blurred(i, j) = num / den;
                }
            x = std::move(blurred);
            break;
        }
        case CorruptionFamily::feature_dropout:
            // entry-wise keep/zero, row-major draw order, zero when u < scale
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j)
                    if (rng.next_double() < scale) x(i, j) = 0.0;
            break;
        case CorruptionFamily::affine_warp: {
            // y = (I + scale/sqrt(d) * G) x + scale * t, G then t drawn
            // row-major from the spec seed
            const double gs = scale / std::sqrt(static_cast<double>(cols));
            Matrix a(cols, cols);
            for (std::size_t i = 0; i < cols; ++i)
                for (std::size_t j = 0; j < cols; ++j)
                    a(i, j) = (i == j ? 1.0 : 0.0) + gs * rng.gaussian();
            std::vector<double> t(cols);
            for (std::size_t j = 0; j < cols; ++j)
                t[j] = scale * rng.gaussian();
            Matrix warped(rows, cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) {
                    double s = t[j];
                    for (std::size_t p = 0; p < cols; ++p)
                        s += a(j, p) * x(i, p);
                    warped(i, j) = s;
                }
            x = std::move(warped);
            break;
        }
    }
    return out;
}

LabeledDataset inject_label_noise(const LabeledDataset& base,
                                  const LabelNoiseSpec& spec) {
    base.validate();
    spec.validate();
    if (base.n_classes < 2)
        fail(ErrorKind::invalid_argument, "label noise needs n_classes >= 2");

    const std::size_t n = base.n_samples();
    const auto k = static_cast<std::size_t>(round_count(spec.rate * n));
    LabeledDataset out = base;
    char tag[64];
    std::snprintf(tag, sizeof(tag), "+label_noise(%g)", spec.rate);
    out.provenance = base.provenance + tag;

    // Draw order: full index shuffle, then one offset draw per flipped index
    // in ascending index order.
    Rng rng(spec.seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    std::vector<std::size_t> chosen(idx.begin(), idx.begin() + k);
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t i : chosen) {
        const auto offset =
            1 + static_cast<int>(rng.below(base.n_classes - 1));
        out.labels[i] = (base.labels[i] + offset) % base.n_classes;
    }
    return out;
}

LabeledDataset inject_measurement_noise(const LabeledDataset& base,
                                        const MeasurementNoiseSpec& spec) {
    base.validate();
    spec.validate();
    LabeledDataset out = base;
    char tag[96];
    std::snprintf(tag, sizeof(tag), "+measurement_noise(blur=%g,noise=%g)",
                  spec.blur_sigma, spec.additive_sigma);
    out.provenance = base.provenance + tag;
    Matrix& x = out.features;
    const std::size_t rows = x.rows(), cols = x.cols();

    // Step 1: blur every row (taps |d| <= 3*sigma, renormalized in-bounds).
    if (spec.blur_sigma > 0.0) {
        const auto r = static_cast<std::ptrdiff_t>(3.0 * spec.blur_sigma);
        if (r > 0) {
            Matrix blurred(rows, cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) {
                    double num = 0.0, den = 0.0;
                    for (std::ptrdiff_t d = -r; d <= r; ++d) {
                        const std::ptrdiff_t jj =
                            static_cast<std::ptrdiff_t>(j) + d;
                        if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(cols))
                            continue;
                        const double w =
                            std::exp(-static_cast<double>(d * d) /
                                     (2.0 * spec.blur_sigma * spec.blur_sigma));
                        num += w * x(i, static_cast<std::size_t>(jj));
                        den += w;
                    }
                    blurred(i, j) = num / den;
                }
            x = std::move(blurred);
        }
    }

    // Step 2: additive gaussian noise, entry-wise row-major from Rng(seed).
    if (spec.additive_sigma > 0.0) {
        Rng rng(spec.seed);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                x(i, j) += spec.additive_sigma * rng.gaussian();
    }
    return out;
}

LabeledDataset undersample(const LabeledDataset& base,
                           const UndersampleSpec& spec) {
    base.validate();
    spec.validate();
    for (int c : spec.target_classes) {
        if (c < 0 || c >= base.n_classes)
            fail(ErrorKind::invalid_argument,
                 "target class " + std::to_string(c) + " outside [0, " +
                     std::to_string(base.n_classes) + ")");
        if (std::find(base.labels.begin(), base.labels.end(), c) ==
            base.labels.end())
            fail(ErrorKind::class_missing,
                 "target class " + std::to_string(c) + " absent from dataset");
    }

    // Per target class in ascending order: shuffle that class's row indices
    // (ascending before the shuffle) and drop the first round(f * n_c).
    Rng rng(spec.seed);
    std::vector<bool> dropped(base.n_samples(), false);
    for (int c : spec.target_classes) { // std::set iterates ascending
        std::vector<std::size_t> rows_c;
        for (std::size_t i = 0; i < base.n_samples(); ++i)
            if (base.labels[i] == c) rows_c.push_back(i);
        const auto k =
            static_cast<std::size_t>(round_count(spec.drop_fraction *
                                                 rows_c.size()));
        rng.shuffle(rows_c);
        for (std::size_t i = 0; i < k; ++i) dropped[rows_c[i]] = true;
    }

    LabeledDataset out;
    out.n_classes = base.n_classes;
    char tag[64];
    std::snprintf(tag, sizeof(tag), "+undersample(%g)", spec.drop_fraction);
    out.provenance = base.provenance + tag;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < base.n_samples(); ++i)
        if (!dropped[i]) keep.push_back(i);
    if (keep.empty())
        fail(ErrorKind::invalid_argument, "undersample removed every row");
    out.features = Matrix(keep.size(), base.n_features());
    out.labels.resize(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        out.labels[r] = base.labels[keep[r]];
        for (std::size_t j = 0; j < base.n_features(); ++j)
            out.features(r, j) = base.features(keep[r], j);
    }
    return out;
}

LabeledDataset make_slab(const SlabSpec& spec) {
    spec.validate();
    LabeledDataset out;
    out.n_classes = 2;
    out.provenance = spec.shift_simple_feature ? "slab:shifted" : "slab";
    out.features = Matrix(spec.n_samples, 2);
    out.labels.resize(spec.n_samples);

    const double w = 2.0 / spec.n_slabs;
    std::vector<int> slabs_of[2];
    for (int s = 0; s < spec.n_slabs; ++s) slabs_of[s % 2].push_back(s);

    // Per sample, in order: label = i % 2 (no draw); coordinate 0 draw;
    // slab pick; in-slab offset; gaussian slab noise (always drawn).
    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        const int label = static_cast<int>(i % 2);
        out.labels[i] = label;

        double x0;
        if (spec.shift_simple_feature) {
            const double b = spec.simple_feature_margin + 1.0;
            x0 = rng.uniform(-b, b);
        } else {
            const double mag =
                rng.uniform(spec.simple_feature_margin,
                            spec.simple_feature_margin + 1.0);
            x0 = label == 1 ? mag : -mag;
        }
        out.features(i, 0) = x0;

        const auto& own = slabs_of[label];
        const int slab = own[rng.below(own.size())];
        const double center = -1.0 + (slab + 0.5) * w;
        const double offset = rng.uniform(-0.3 * w, 0.3 * w);
        const double noise = rng.gaussian() * spec.slab_noise;
        out.features(i, 1) = center + offset + noise;
    }
    return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& base,
                                                double train_fraction,
                                                double val_fraction,
                                                std::uint64_t seed) {
    base.validate();
    if (!(train_fraction > 0.0) || !(val_fraction > 0.0))
        fail(ErrorKind::invalid_argument, "split fractions must be positive");
    if (std::abs(train_fraction + val_fraction - 1.0) > 1e-9)
        fail(ErrorKind::invalid_argument, "split fractions must sum to 1");

    Rng rng(seed);
    std::vector<bool> in_train(base.n_samples(), false);
    for (int c = 0; c < base.n_classes; ++c) {
        std::vector<std::size_t> rows_c;
        for (std::size_t i = 0; i < base.n_samples(); ++i)
            if (base.labels[i] == c) rows_c.push_back(i);
        if (rows_c.empty()) continue;
        const auto k = static_cast<std::size_t>(
            round_count(train_fraction * rows_c.size()));
        if (k == 0 || k == rows_c.size())
            fail(ErrorKind::split_granularity,
                 "class " + std::to_string(c) + " with " +
                     std::to_string(rows_c.size()) +
                     " samples cannot fill both split parts");
        rng.shuffle(rows_c);
        for (std::size_t i = 0; i < k; ++i) in_train[rows_c[i]] = true;
    }

    auto build = [&](bool want_train, const char* tag) {
        LabeledDataset part;
        part.n_classes = base.n_classes;
        part.provenance = base.provenance + tag;
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < base.n_samples(); ++i)
            if (in_train[i] == want_train) keep.push_back(i);
        part.features = Matrix(keep.size(), base.n_features());
        part.labels.resize(keep.size());
        for (std::size_t r = 0; r < keep.size(); ++r) {
            part.labels[r] = base.labels[keep[r]];
            for (std::size_t j = 0; j < base.n_features(); ++j)
                part.features(r, j) = base.features(keep[r], j);
        }
        return part;
    };
    return {build(true, "+split(train)"), build(false, "+split(val)")};
}

LabeledDataset scramble_feature(const LabeledDataset& base, std::size_t col,
                                std::uint64_t seed) {
    base.validate();
    if (col >= base.n_features())
        fail(ErrorKind::invalid_argument,
             "scramble column " + std::to_string(col) + " outside [0, " +
                 std::to_string(base.n_features()) + ")");
    LabeledDataset out = base;
    out.provenance =
        base.provenance + "+scramble(col=" + std::to_string(col) + ")";
    std::vector<std::size_t> perm(base.n_samples());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);
    for (std::size_t i = 0; i < base.n_samples(); ++i)
        out.features(i, col) = base.features(perm[i], col);
    return out;
}

} // namespace gepbench
