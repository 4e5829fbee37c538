#pragma once

#include <cstdint>
#include <vector>

#include "gepbench/dataset.hpp"
#include "gepbench/matrix.hpp"
#include "gepbench/rng.hpp"

namespace gepbench {

enum class Activation { relu, tanh };

// Small feed-forward classifier. Hidden layers use the configured activation;
// the final layer emits raw logits. Immutable after construction.
struct MlpModel {
    std::vector<std::size_t> layer_dims; // input -> hidden... -> n_classes
    std::vector<Matrix> weights;         // weights[i]: dims[i] x dims[i+1]
    std::vector<std::vector<double>> biases;
    Activation activation = Activation::relu;

    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t n_classes() const { return layer_dims.back(); }
    std::size_t n_layers() const { return weights.size(); }

    bool operator==(const MlpModel& o) const = default;
};

struct TrainConfig {
    std::size_t epochs = 200;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], drawn layer by layer
// (weights row-major, then bias = 0) from Rng(seed).
MlpModel init_mlp(const std::vector<std::size_t>& layer_dims,
                  Activation activation, std::uint64_t seed);

// Logits for one sample. x.size() must equal layer_dims[0].
std::vector<double> forward(const MlpModel& model,
                            const std::vector<double>& x);

// Logits for every row of x, one row per sample.
Matrix forward_batch(const MlpModel& model, const Matrix& x);

// Numerically stabilized softmax (max subtraction).
std::vector<double> softmax(const std::vector<double>& logits);

// Argmax with ties broken toward the lowest index.
std::size_t argmax(const double* v, std::size_t n);
std::size_t argmax(const std::vector<double>& v);

// Per-sample argmax predictions over a dataset.
std::vector<int> predict(const MlpModel& model, const LabeledDataset& data);

// Analytic mean cross-entropy loss and its gradient for every parameter.
struct ParamGradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};
double ce_loss_and_gradients(const MlpModel& model, const Matrix& x,
                             const std::vector<int>& labels,
                             ParamGradients& grads);

// Plain mini-batch SGD on softmax cross-entropy. Weight decay applies to
// weights only, not biases. Epoch shuffling and init are both derived from
// cfg.seed (init stream = split 0, shuffle stream = split 1, advanced across
// epochs), so identical inputs give a bitwise-identical model.
// If epoch_losses is non-null it receives the mean training loss per epoch.
MlpModel train_sgd(const LabeledDataset& data, const TrainConfig& cfg,
                   const std::vector<std::size_t>& layer_dims,
                   Activation activation = Activation::relu,
                   std::vector<double>* epoch_losses = nullptr);

// Compares the analytic cross-entropy gradient against central finite
// differences over every parameter. Returns the max of
// |analytic - numeric| / max(|analytic| + |numeric|, 1e-6).
double grad_check(const MlpModel& model, const LabeledDataset& batch,
                  double epsilon);

} // namespace gepbench
