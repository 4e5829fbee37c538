#include "gepbench/mlp.hpp"

#include <cmath>
#include <numeric>

#include "gepbench/kernels.hpp"

namespace gepbench {

void TrainConfig::validate() const {
    if (epochs < 1) fail(ErrorKind::invalid_argument, "epochs must be >= 1");
    // lr = 0 is legal (zero-step training leaves the model at init)
    if (!(learning_rate >= 0.0))
        fail(ErrorKind::invalid_argument, "learning_rate must be >= 0");
    if (batch_size < 1)
        fail(ErrorKind::invalid_argument, "batch_size must be >= 1");
    if (weight_decay < 0.0)
        fail(ErrorKind::invalid_argument, "weight_decay must be >= 0");
}

MlpModel init_mlp(const std::vector<std::size_t>& layer_dims,
                  Activation activation, std::uint64_t seed) {
    if (layer_dims.size() < 2)
        fail(ErrorKind::invalid_argument,
             "layer_dims needs at least input and output");
    for (std::size_t d : layer_dims)
        if (d == 0) fail(ErrorKind::invalid_argument, "zero layer dim");

    MlpModel m;
    m.layer_dims = layer_dims;
    m.activation = activation;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const std::size_t fan_in = layer_dims[l];
        const std::size_t fan_out = layer_dims[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix w(fan_in, fan_out);
        for (std::size_t i = 0; i < w.size(); ++i)
            w.data()[i] = rng.uniform(-bound, bound);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(fan_out, 0.0);
    }
    return m;
}

namespace {

void check_input_dim(const MlpModel& model, std::size_t got) {
    if (got != model.input_dim())
        fail(ErrorKind::dim_mismatch,
             "forward: expected input dim " + std::to_string(model.input_dim()) +
                 ", got " + std::to_string(got));
}

void apply_activation(const MlpModel& model, Matrix& x) {
    if (model.activation == Activation::relu)
        kern::relu(x);
    else
        kern::tanh_act(x);
}

// Forward pass keeping per-layer pre- and post-activation values for backprop.
struct ForwardTrace {
    std::vector<Matrix> pre;  // pre[l]: inputs to activation of layer l
    std::vector<Matrix> post; // post[l]: layer outputs (post[last] = logits)
};

ForwardTrace forward_trace(const MlpModel& model, const Matrix& x) {
    ForwardTrace t;
    Matrix cur = x;
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        Matrix z;
        kern::matmul(cur, model.weights[l], z);
        kern::add_row_bias(z, model.biases[l]);
        t.pre.push_back(z);
        if (l + 1 < model.n_layers()) apply_activation(model, z);
        t.post.push_back(z);
        cur = t.post.back();
    }
    return t;
}

} // namespace

double ce_loss_and_gradients(const MlpModel& model, const Matrix& x,
                             const std::vector<int>& labels,
                             ParamGradients& g) {
    ForwardTrace t = forward_trace(model, x);
    Matrix probs = t.post.back();
    kern::softmax_rows(probs);
    Matrix delta;
    const double loss = kern::cross_entropy_grad(probs, labels, delta);

    g.weights.assign(model.n_layers(), Matrix());
    g.biases.assign(model.n_layers(), {});
    for (std::size_t l = model.n_layers(); l-- > 0;) {
        const Matrix& input = l == 0 ? x : t.post[l - 1];
        kern::matmul_at_b(input, delta, g.weights[l]);
        std::vector<double> db(model.layer_dims[l + 1], 0.0);
        for (std::size_t i = 0; i < delta.rows(); ++i)
            for (std::size_t j = 0; j < delta.cols(); ++j)
                db[j] += delta(i, j);
        g.biases[l] = std::move(db);
        if (l == 0) break;
        Matrix prev_delta;
        kern::matmul_a_bt(delta, model.weights[l], prev_delta);
        if (model.activation == Activation::relu)
            kern::relu_backward(t.pre[l - 1], prev_delta);
        else
            kern::tanh_backward(t.post[l - 1], prev_delta);
        delta = std::move(prev_delta);
    }
    return loss;
}

namespace {

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& idx,
                   std::size_t begin, std::size_t end) {
    Matrix out(end - begin, src.cols());
    for (std::size_t r = begin; r < end; ++r)
        for (std::size_t j = 0; j < src.cols(); ++j)
            out(r - begin, j) = src(idx[r], j);
    return out;
}

} // namespace

std::vector<double> forward(const MlpModel& model,
                            const std::vector<double>& x) {
    check_input_dim(model, x.size());
    for (double v : x)
        if (!std::isfinite(v))
            fail(ErrorKind::invalid_argument, "forward: non-finite input");
    Matrix m(1, x.size());
    for (std::size_t j = 0; j < x.size(); ++j) m(0, j) = x[j];
    Matrix logits = forward_batch(model, m);
    return logits.row_copy(0);
}

Matrix forward_batch(const MlpModel& model, const Matrix& x) {
    check_input_dim(model, x.cols());
    Matrix cur = x;
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        Matrix z;
        kern::matmul(cur, model.weights[l], z);
        kern::add_row_bias(z, model.biases[l]);
        if (l + 1 < model.n_layers()) apply_activation(model, z);
        cur = std::move(z);
    }
    return cur;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    if (logits.empty()) fail(ErrorKind::empty_input, "softmax: empty logits");
    Matrix m(1, logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) m(0, j) = logits[j];
    kern::softmax_rows(m);
    return m.row_copy(0);
}

std::size_t argmax(const double* v, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (v[j] > v[best]) best = j; // strict: ties go to the lowest index
    return best;
}

std::size_t argmax(const std::vector<double>& v) {
    return argmax(v.data(), v.size());
}

std::vector<int> predict(const MlpModel& model, const LabeledDataset& data) {
    Matrix logits = forward_batch(model, data.features);
    std::vector<int> preds(logits.rows());
    for (std::size_t i = 0; i < logits.rows(); ++i)
        preds[i] = static_cast<int>(argmax(logits.row(i), logits.cols()));
    return preds;
}

MlpModel train_sgd(const LabeledDataset& data, const TrainConfig& cfg,
                   const std::vector<std::size_t>& layer_dims,
                   Activation activation, std::vector<double>* epoch_losses) {
    cfg.validate();
    data.validate();
    if (layer_dims.front() != data.n_features())
        fail(ErrorKind::dim_mismatch,
             "train_sgd: layer_dims[0] " + std::to_string(layer_dims.front()) +
                 " != n_features " + std::to_string(data.n_features()));
    if (layer_dims.back() != static_cast<std::size_t>(data.n_classes))
        fail(ErrorKind::dim_mismatch,
             "train_sgd: output dim " + std::to_string(layer_dims.back()) +
                 " != n_classes " + std::to_string(data.n_classes));

    Rng root(cfg.seed);
    MlpModel model = init_mlp(layer_dims, activation, root.split_seed(0));
    Rng shuffle_rng = root.split(1);

    const std::size_t n = data.n_samples();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    if (epoch_losses) epoch_losses->clear();
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, n);
            Matrix bx = gather_rows(data.features, order, begin, end);
            std::vector<int> by(end - begin);
            for (std::size_t r = begin; r < end; ++r)
                by[r - begin] = data.labels[order[r]];

            ParamGradients g;
            const double loss = ce_loss_and_gradients(model, bx, by, g);
            if (!std::isfinite(loss))
                fail(ErrorKind::nan_loss,
                     "train_sgd: non-finite loss " + std::to_string(loss) +
                         " at step " + std::to_string(step));
            for (std::size_t l = 0; l < model.n_layers(); ++l) {
                if (cfg.weight_decay > 0.0)
                    kern::axpy(-cfg.learning_rate * cfg.weight_decay,
                               model.weights[l], model.weights[l]);
                kern::axpy(-cfg.learning_rate, g.weights[l], model.weights[l]);
                kern::axpy(-cfg.learning_rate, g.biases[l], model.biases[l]);
            }
            epoch_loss += loss;
            ++n_batches;
            ++step;
        }
        if (epoch_losses)
            epoch_losses->push_back(epoch_loss / static_cast<double>(n_batches));
    }
    return model;
}

double grad_check(const MlpModel& model, const LabeledDataset& batch,
                  double epsilon) {
    if (epsilon < 1e-7 || epsilon > 1e-3)
        fail(ErrorKind::invalid_argument, "epsilon outside [1e-7, 1e-3]");
    batch.validate();

    MlpModel m = model; // probed in place, each parameter restored after use
    ParamGradients g;
    ce_loss_and_gradients(m, batch.features, batch.labels, g);

    auto loss_of = [&]() {
        Matrix probs = forward_batch(m, batch.features);
        kern::softmax_rows(probs);
        Matrix scratch;
        return kern::cross_entropy_grad(probs, batch.labels, scratch);
    };

    double max_rel = 0.0;
    auto probe = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + epsilon;
        const double up = loss_of();
        param = saved - epsilon;
        const double down = loss_of();
        param = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double rel = std::abs(analytic - numeric) /
                           std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
        max_rel = std::max(max_rel, rel);
    };

    for (std::size_t l = 0; l < m.n_layers(); ++l) {
        for (std::size_t i = 0; i < m.weights[l].size(); ++i)
            probe(m.weights[l].data()[i], g.weights[l].data()[i]);
        for (std::size_t j = 0; j < m.biases[l].size(); ++j)
            probe(m.biases[l][j], g.biases[l][j]);
    }
    return max_rel;
}

} // namespace gepbench
