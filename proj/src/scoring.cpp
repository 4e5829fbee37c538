#include "gepbench/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "gepbench/kernels.hpp"

namespace gepbench {

std::string to_string(ScoreMethod m) {
    switch (m) {
        case ScoreMethod::conf: return "conf";
        case ScoreMethod::lms: return "lms";
        case ScoreMethod::ma: return "ma";
    }
    fail(ErrorKind::invalid_argument, "unknown score method");
}

void AugmentationPolicy::validate() const {
    if (count < 1) fail(ErrorKind::invalid_argument, "K >= 1");
    if (!(jitter_sigma >= 0.0))
        fail(ErrorKind::invalid_argument, "jitter_sigma >= 0");
    if (!(scale_low <= scale_high))
        fail(ErrorKind::invalid_argument, "scale_low <= scale_high");
}

ScoreVector conf_score(const MlpModel& model, const LabeledDataset& data) {
    Matrix logits = forward_batch(model, data.features);
    return conf_score_from_logits(logits);
}

ScoreVector conf_score_from_logits(const Matrix& logits) {
    if (logits.rows() == 0)
        fail(ErrorKind::empty_input, "conf_score: empty logits");
    Matrix probs = logits;
    kern::softmax_rows(probs);
    ScoreVector out;
    out.method = ScoreMethod::conf;
    out.scores.resize(probs.rows());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        const double* row = probs.row(i);
        out.scores[i] = *std::max_element(row, row + probs.cols());
    }
    return out;
}

ScoreVector lms_score(const MlpModel& model, const LabeledDataset& data,
                      const AugmentationPolicy& policy) {
    policy.validate();
    if (data.n_features() != model.input_dim())
        fail(ErrorKind::dim_mismatch,
             "lms_score: data has " + std::to_string(data.n_features()) +
                 " features, model expects " +
                 std::to_string(model.input_dim()));

    data.validate();

    const std::size_t n = data.n_samples();
    const std::size_t d = data.n_features();
    std::vector<int> base = predict(model, data);

    ScoreVector out;
    out.method = ScoreMethod::lms;
    out.k = policy.count;
    out.scores.resize(n);

    std::exception_ptr err; // exceptions must not escape the parallel region
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            Rng rng = Rng(policy.seed).split(i);
            std::vector<double> copy(d);
            std::size_t matches = 0;
            for (std::size_t k = 0; k < policy.count; ++k) {
                for (std::size_t j = 0; j < d; ++j)
                    copy[j] = data.features(i, j) +
                              policy.jitter_sigma * rng.gaussian();
                const double scale =
                    rng.uniform(policy.scale_low, policy.scale_high);
                for (std::size_t j = 0; j < d; ++j) copy[j] *= scale;
                const auto pred = argmax(forward(model, copy));
                if (static_cast<int>(pred) == base[i]) ++matches;
            }
            out.scores[i] = static_cast<double>(matches) /
                            static_cast<double>(policy.count);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

namespace {

// Modal vote fraction; modal ties resolve to the lowest class index.
double modal_fraction(const std::vector<int>& votes, int n_classes) {
    std::vector<int> counts(n_classes, 0);
    for (int v : votes) ++counts[v];
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
        if (counts[c] > counts[best]) best = c;
    return static_cast<double>(counts[best]) /
           static_cast<double>(votes.size());
}

int modal_class(const std::vector<int>& votes, int n_classes) {
    std::vector<int> counts(n_classes, 0);
    for (int v : votes) ++counts[v];
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
        if (counts[c] > counts[best]) best = c;
    return best;
}

void check_members(const std::vector<Matrix>& member_logits) {
    if (member_logits.empty())
        fail(ErrorKind::empty_input, "no ensemble members");
    for (std::size_t m = 1; m < member_logits.size(); ++m)
        if (member_logits[m].rows() != member_logits[0].rows() ||
            member_logits[m].cols() != member_logits[0].cols())
            fail(ErrorKind::shape_mismatch,
                 "member " + std::to_string(m) + " logits are " +
                     std::to_string(member_logits[m].rows()) + "x" +
                     std::to_string(member_logits[m].cols()) + ", member 0 is " +
                     std::to_string(member_logits[0].rows()) + "x" +
                     std::to_string(member_logits[0].cols()));
}

std::vector<std::vector<int>> member_votes(
    const std::vector<Matrix>& member_logits) {
    check_members(member_logits);
    const std::size_t n = member_logits[0].rows();
    const std::size_t c = member_logits[0].cols();
    std::vector<std::vector<int>> votes(n,
                                        std::vector<int>(member_logits.size()));
    for (std::size_t m = 0; m < member_logits.size(); ++m)
        for (std::size_t i = 0; i < n; ++i)
            votes[i][m] =
                static_cast<int>(argmax(member_logits[m].row(i), c));
    return votes;
}

std::vector<Matrix> ensemble_logits(const Ensemble& ensemble,
                                    const LabeledDataset& data) {
    if (ensemble.members.empty())
        fail(ErrorKind::empty_input, "empty ensemble");
    for (std::size_t m = 1; m < ensemble.members.size(); ++m)
        if (ensemble.members[m].layer_dims != ensemble.members[0].layer_dims)
            fail(ErrorKind::dim_mismatch,
                 "ensemble member " + std::to_string(m) +
                     " has mismatched layer dims");
    std::vector<Matrix> logits(ensemble.members.size());
    for (std::size_t m = 0; m < ensemble.members.size(); ++m)
        logits[m] = forward_batch(ensemble.members[m], data.features);
    return logits;
}

} // namespace

ScoreVector ma_score(const Ensemble& ensemble, const LabeledDataset& data) {
    ScoreVector out = ma_score_from_logits(ensemble_logits(ensemble, data));
    out.eps = ensemble.diversity_noise;
    return out;
}

ScoreVector ma_score_from_logits(const std::vector<Matrix>& member_logits) {
    const auto votes = member_votes(member_logits);
    const int n_classes = static_cast<int>(member_logits[0].cols());
    ScoreVector out;
    out.method = ScoreMethod::ma;
    out.m = member_logits.size();
    out.scores.resize(votes.size());
    for (std::size_t i = 0; i < votes.size(); ++i)
        out.scores[i] = modal_fraction(votes[i], n_classes);
    return out;
}

std::uint64_t ensemble_member_noise_seed(std::uint64_t cfg_seed,
                                         std::size_t member) {
    return Rng(cfg_seed).split(member).split_seed(0);
}

std::uint64_t ensemble_member_train_seed(std::uint64_t cfg_seed,
                                         std::size_t member) {
    return Rng(cfg_seed).split(member).split_seed(1);
}

Ensemble train_ensemble(const LabeledDataset& train, const TrainConfig& cfg,
                        const std::vector<std::size_t>& layer_dims,
                        std::size_t m_members, double eps,
                        Activation activation) {
    if (m_members < 1) fail(ErrorKind::invalid_argument, "M >= 1");
    if (!(eps >= 0.0 && eps <= 1.0))
        fail(ErrorKind::invalid_argument, "eps in [0,1]");
    cfg.validate();
    train.validate();

    Ensemble out;
    out.diversity_noise = eps;
    out.members.resize(m_members);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t m = 0; m < m_members; ++m) {
        try {
            TrainConfig member_cfg = cfg;
            member_cfg.seed = ensemble_member_train_seed(cfg.seed, m);
            if (eps > 0.0) {
                LabelNoiseSpec noise{eps,
                                     ensemble_member_noise_seed(cfg.seed, m)};
                out.members[m] = train_sgd(inject_label_noise(train, noise),
                                           member_cfg, layer_dims, activation);
            } else {
                out.members[m] =
                    train_sgd(train, member_cfg, layer_dims, activation);
            }
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

std::vector<int> ensemble_predict(const Ensemble& ensemble,
                                  const LabeledDataset& data) {
    return ensemble_predict_from_logits(ensemble_logits(ensemble, data));
}

std::vector<int> ensemble_predict_from_logits(
    const std::vector<Matrix>& member_logits) {
    const auto votes = member_votes(member_logits);
    const int n_classes = static_cast<int>(member_logits[0].cols());
    std::vector<int> preds(votes.size());
    for (std::size_t i = 0; i < votes.size(); ++i)
        preds[i] = modal_class(votes[i], n_classes);
    return preds;
}

} // namespace gepbench
