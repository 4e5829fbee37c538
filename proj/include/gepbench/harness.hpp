#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gepbench/datagen.hpp"
#include "gepbench/gep.hpp"
#include "gepbench/scoring.hpp"

namespace gepbench {

enum class BenchMethod { conf, lms, ma, ma_eps };
std::string to_string(BenchMethod m);

enum class FidelityCondition { clean, label_noise, measurement_noise, undersample };
std::string to_string(FidelityCondition c);

struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::size_t n_seeds = 10;
    std::vector<BenchMethod> methods = {BenchMethod::conf, BenchMethod::lms,
                                        BenchMethod::ma};
    SourceSpec source;          // seed field derived per run seed
    double near_magnitude = 0.5;
    double far_magnitude = 2.0;
    std::vector<CorruptionFamily> corruption_families = {
        CorruptionFamily::additive_noise, CorruptionFamily::feature_blur,
        CorruptionFamily::feature_dropout, CorruptionFamily::affine_warp};
    std::vector<int> severities = {1, 2, 3, 4, 5};
    std::vector<FidelityCondition> fidelity = {
        FidelityCondition::clean, FidelityCondition::label_noise,
        FidelityCondition::measurement_noise, FidelityCondition::undersample};
    double label_noise_rate = 0.05;
    double blur_sigma = 0.5;
    double additive_sigma = 0.07;
    std::set<int> undersample_classes = {1, 2};
    double undersample_fraction = 0.2;
    TrainConfig train;          // seed field derived per run seed
    std::vector<std::size_t> hidden_dims = {32};
    Activation activation = Activation::relu;
    double train_fraction = 0.8;
    double val_fraction = 0.2;
    std::size_t ensemble_m = 10;
    double ensemble_eps = 0.02;
    AugmentationPolicy augmentation; // seed field derived per run seed
    std::vector<std::size_t> sweep_sizes = {2, 4, 6, 8, 10};
    SlabSpec slab;              // seed/shift fields derived per run seed

    void validate() const;
    std::vector<std::size_t> layer_dims() const; // input, hidden..., classes
};

struct EvaluationRecord {
    std::string condition;
    std::string method;
    std::string target;
    std::uint64_t seed_index = 0;
    double true_accuracy = 0.0;
    double predicted_accuracy = 0.0;
    double abs_error = 0.0;

    bool operator==(const EvaluationRecord&) const = default;
};

struct SummaryCell {
    std::string condition;
    std::string method;
    std::string target;
    double mae = 0.0;
    double std_dev = 0.0;      // sample std over seeds, n-1 denominator
    double mean_gap = 0.0;     // mean signed (predicted - true); flags
                               // over-estimation when positive
    std::size_t n = 0;

    bool operator==(const SummaryCell&) const = default;
};

struct RunReport {
    std::string bench_name;
    std::string config_echo;   // canonical JSON text of the config used
    std::vector<EvaluationRecord> records; // sorted: condition,method,target,seed
    std::vector<SummaryCell> summary;      // aggregate(records)
    double wall_clock_seconds = 0.0;       // excluded from serialized output
};

// Groups by (condition, method, target); MAE = mean abs_error, std_dev =
// sample standard deviation (0 when n = 1). Output sorted canonically.
std::vector<SummaryCell> aggregate(const std::vector<EvaluationRecord>& records);

// Per-seed stream purposes. Every random decision inside a run derives from
// Rng(cfg.seed).split(seed_index).split_seed(purpose), so records for seed s
// do not depend on n_seeds and runners that share purposes produce
// bitwise-identical intermediate artifacts.
namespace stream {
constexpr std::uint64_t source = 1;
constexpr std::uint64_t data_split = 2;
constexpr std::uint64_t train_single = 3;
constexpr std::uint64_t ensemble = 4;
constexpr std::uint64_t ensemble_eps = 5;
constexpr std::uint64_t id_test = 6;
constexpr std::uint64_t shift_near = 7;
constexpr std::uint64_t shift_far = 8;
constexpr std::uint64_t lms_policy = 9;
constexpr std::uint64_t slab_train = 16;
constexpr std::uint64_t slab_target = 17;
constexpr std::uint64_t slab_id_test = 18;
constexpr std::uint64_t scramble_test = 19;
constexpr std::uint64_t scramble_train = 20;
constexpr std::uint64_t corrupt_base = 32; // + corruption family index
} // namespace stream

std::uint64_t derive_seed(const ExperimentConfig& cfg, std::size_t seed_index,
                          std::uint64_t purpose);

// Source distribution shifts and the corruption ladder (Table-1-style study).
RunReport run_shift_benchmark(const ExperimentConfig& cfg);

// Training-data fidelity study: the training split is transformed per
// condition (label noise / measurement noise / undersampling) before
// training; targets are the near and far shifts (Table-2-style study).
RunReport run_fidelity_benchmark(const ExperimentConfig& cfg);

// Trains one max(sizes)-member ensemble per seed and scores member prefixes
// of each requested size; conditions are tagged "M=<size>".
RunReport run_ensemble_sweep(const ExperimentConfig& cfg,
                             const std::vector<std::size_t>& sizes);

// Simplicity-bias stress test on the slab dataset; conditions "biased" and
// "scrambled_train" (coordinate-0-scrambled training ablation).
RunReport run_simplicity_bias(const ExperimentConfig& cfg,
                              const SlabSpec& slab);

} // namespace gepbench
