#include <doctest.h>

#include <cmath>

#include "gepbench/mlp.hpp"

using namespace gepbench;

namespace {

// Independent loss evaluator: straight-line forward + softmax + mean CE.
double oracle_loss(const MlpModel& m, const LabeledDataset& batch) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < batch.n_samples(); ++i) {
        std::vector<double> cur = batch.features.row_copy(i);
        for (std::size_t l = 0; l < m.n_layers(); ++l) {
            std::vector<double> next(m.layer_dims[l + 1]);
            for (std::size_t j = 0; j < next.size(); ++j) {
                double s = m.biases[l][j];
                for (std::size_t p = 0; p < cur.size(); ++p)
                    s += cur[p] * m.weights[l](p, j);
                next[j] = s;
            }
            if (l + 1 < m.n_layers())
                for (double& v : next)
                    v = m.activation == Activation::relu ? std::max(v, 0.0)
                                                         : std::tanh(v);
            cur = std::move(next);
        }
        long double mx = cur[0];
        for (double v : cur) mx = std::max<long double>(mx, v);
        long double z = 0.0L;
        for (double v : cur) z += expl(v - mx);
        total += -(cur[batch.labels[i]] - mx - logl(z));
    }
    return static_cast<double>(total / batch.n_samples());
}

LabeledDataset random_batch(std::size_t n, std::size_t d, int classes,
                            Rng& rng) {
    LabeledDataset data;
    data.n_classes = classes;
    data.provenance = "grad-batch";
    data.features = Matrix(n, d);
    data.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        data.labels[i] = static_cast<int>(rng.below(classes));
        for (std::size_t j = 0; j < d; ++j)
            data.features(i, j) = rng.gaussian();
    }
    return data;
}

} // namespace

TEST_CASE("zero-weight model: bias gradients match finite differences") {
    MlpModel m;
    m.layer_dims = {2, 3};
    m.weights = {Matrix(2, 3)};
    m.biases = {std::vector<double>(3, 0.0)};

    // symmetric batch: every class appears once, features mirror each other
    LabeledDataset batch;
    batch.n_classes = 3;
    batch.provenance = "sym";
    batch.features = Matrix::from_rows({{1, -1}, {-1, 1}, {1, -1}});
    batch.labels = {0, 1, 2};

    ParamGradients g;
    ce_loss_and_gradients(m, batch.features, batch.labels, g);

    const double eps = 1e-5;
    for (std::size_t j = 0; j < 3; ++j) {
        MlpModel up = m, down = m;
        up.biases[0][j] += eps;
        down.biases[0][j] -= eps;
        const double numeric =
            (oracle_loss(up, batch) - oracle_loss(down, batch)) / (2 * eps);
        CHECK(std::abs(g.biases[0][j] - numeric) <= 1e-6);
    }
}

TEST_CASE("seed-7 2-4-3 model, 16-point batch: grad_check < 1e-4") {
    Rng rng(7);
    const MlpModel m = init_mlp({2, 4, 3}, Activation::relu, rng.next_u64());
    LabeledDataset batch = random_batch(16, 2, 3, rng);
    CHECK(grad_check(m, batch, 1e-5) < 1e-4);
}

TEST_CASE("single-layer linear model on one sample: closed-form gradient") {
    const MlpModel m = init_mlp({3, 4}, Activation::relu, 31);
    LabeledDataset batch;
    batch.n_classes = 4;
    batch.provenance = "one";
    batch.features = Matrix::from_rows({{0.5, -1.25, 2.0}});
    batch.labels = {2};

    ParamGradients g;
    ce_loss_and_gradients(m, batch.features, batch.labels, g);

    const auto probs = softmax(forward(m, batch.features.row_copy(0)));
    for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t j = 0; j < 4; ++j) {
            const double onehot = j == 2 ? 1.0 : 0.0;
            const double expect = batch.features(0, p) * (probs[j] - onehot);
            CHECK(g.weights[0](p, j) == doctest::Approx(expect).epsilon(1e-12));
        }
    for (std::size_t j = 0; j < 4; ++j) {
        const double onehot = j == 2 ? 1.0 : 0.0;
        CHECK(g.biases[0][j] ==
              doctest::Approx(probs[j] - onehot).epsilon(1e-12));
    }
}

TEST_CASE("grad_check over 20 random model/batch pairs stays under 1e-4") {
    Rng rng(100);
    for (int trial = 0; trial < 20; ++trial) {
        const Activation act =
            trial % 2 ? Activation::tanh : Activation::relu;
        const MlpModel m = init_mlp({3, 6, 4}, act, rng.next_u64());
        LabeledDataset batch = random_batch(8, 3, 4, rng);
        CHECK(grad_check(m, batch, 1e-5) < 1e-4);
    }
}

TEST_CASE("grad_check rejects epsilon outside [1e-7, 1e-3]") {
    Rng rng(8);
    const MlpModel m = init_mlp({2, 3}, Activation::relu, 1);
    LabeledDataset batch = random_batch(4, 2, 3, rng);
    CHECK_THROWS_AS(grad_check(m, batch, 1e-8), Error);
    CHECK_THROWS_AS(grad_check(m, batch, 1e-2), Error);
}
