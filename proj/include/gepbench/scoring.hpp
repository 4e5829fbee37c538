#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gepbench/datagen.hpp"
#include "gepbench/mlp.hpp"

namespace gepbench {

enum class ScoreMethod { conf, lms, ma };

std::string to_string(ScoreMethod m);

// Per-sample scores in [0,1]; the GEP's only input besides labels.
struct ScoreVector {
    std::vector<double> scores;
    ScoreMethod method = ScoreMethod::conf;
    // method parameters actually used (0 when not applicable)
    std::size_t k = 0;  // lms augmentation count
    std::size_t m = 0;  // ma ensemble size
    double eps = 0.0;   // ma diversity noise

    std::size_t size() const { return scores.size(); }
};

struct Ensemble {
    std::vector<MlpModel> members;
    double diversity_noise = 0.0; // 0 for plain MA, 0.02 for MA_0.02

    std::size_t size() const { return members.size(); }
};

struct AugmentationPolicy {
    std::size_t count = 10; // K
    double jitter_sigma = 0.3;
    double scale_low = 0.9; // multiplicative range around 1
    double scale_high = 1.1;
    std::uint64_t seed = 0;

    void validate() const;
};

// Max softmax probability of the model's prediction. Labels unused.
ScoreVector conf_score(const MlpModel& model, const LabeledDataset& data);
ScoreVector conf_score_from_logits(const Matrix& logits);

// Fraction of K augmented copies whose predicted class matches the clean
// sample's predicted class. Augmentation recipe, replayable per sample i from
// Rng(policy.seed).split(i): for each copy, jitter every feature with
// N(0, jitter_sigma^2), then scale the whole vector by one
// Uniform[scale_low, scale_high) draw.
ScoreVector lms_score(const MlpModel& model, const LabeledDataset& data,
                      const AugmentationPolicy& policy);

// Fraction of members voting the sample's modal class; modal ties break
// toward the lowest class index. Labels unused.
ScoreVector ma_score(const Ensemble& ensemble, const LabeledDataset& data);
ScoreVector ma_score_from_logits(const std::vector<Matrix>& member_logits);

// Member m trains on inject_label_noise(train, eps) when eps > 0, with
// noise seed Rng(cfg.seed).split(m).split_seed(0) and train seed
// Rng(cfg.seed).split(m).split_seed(1); eps = 0 members still differ through
// init and shuffling. Members may train concurrently; seeds are positional.
Ensemble train_ensemble(const LabeledDataset& train, const TrainConfig& cfg,
                        const std::vector<std::size_t>& layer_dims,
                        std::size_t m_members, double eps,
                        Activation activation = Activation::relu);

// Seed derivation used by train_ensemble, exposed so member runs can be
// reproduced standalone.
std::uint64_t ensemble_member_noise_seed(std::uint64_t cfg_seed,
                                         std::size_t member);
std::uint64_t ensemble_member_train_seed(std::uint64_t cfg_seed,
                                         std::size_t member);

// Majority vote per sample, ties toward the lowest class index.
std::vector<int> ensemble_predict(const Ensemble& ensemble,
                                  const LabeledDataset& data);
std::vector<int> ensemble_predict_from_logits(
    const std::vector<Matrix>& member_logits);

} // namespace gepbench
