#include "gepbench/gep.hpp"

#include <algorithm>
#include <cmath>

namespace gepbench {

namespace {

double fraction_at_or_above(const std::vector<double>& sorted, double tau) {
    // sorted ascending; count of entries >= tau
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), tau);
    return static_cast<double>(sorted.end() - it) /
           static_cast<double>(sorted.size());
}

} // namespace

Threshold calibrate_threshold(const CalibrationInput& input) {
    const auto& s = input.val_scores.scores;
    if (s.empty()) fail(ErrorKind::empty_input, "calibrate: empty scores");
    if (!(input.val_accuracy >= 0.0 && input.val_accuracy <= 1.0))
        fail(ErrorKind::invalid_argument, "acc_val outside [0,1]");

    std::vector<double> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> candidates = sorted;
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    candidates.push_back(candidates.back() + 1.0); // the "count zero" region

    Threshold best;
    double best_err = -1.0;
    for (double tau : candidates) { // ascending: first minimum = smallest tau
        const double err =
            std::abs(input.val_accuracy - fraction_at_or_above(sorted, tau));
        if (best_err < 0.0 || err < best_err) {
            best_err = err;
            best.tau = tau;
        }
    }
    best.achieved_val_error = best_err;
    return best;
}

GepEstimate predict_accuracy(const ScoreVector& scores,
                             const Threshold& threshold,
                             const std::string& target_tag) {
    if (scores.scores.empty())
        fail(ErrorKind::empty_input, "predict_accuracy: empty scores");
    std::size_t count = 0;
    for (double v : scores.scores)
        if (v >= threshold.tau) ++count;
    GepEstimate est;
    est.predicted_accuracy =
        static_cast<double>(count) / static_cast<double>(scores.size());
    est.tau = threshold.tau;
    est.method = to_string(scores.method);
    est.target = target_tag;
    return est;
}

double true_accuracy(const std::vector<int>& predictions,
                     const std::vector<int>& labels) {
    if (predictions.size() != labels.size())
        fail(ErrorKind::length_mismatch,
             "true_accuracy: " + std::to_string(predictions.size()) +
                 " predictions vs " + std::to_string(labels.size()) +
                 " labels");
    if (predictions.empty())
        fail(ErrorKind::empty_input, "true_accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double mae(const std::vector<GepEstimate>& estimates,
           const std::vector<double>& truths) {
    if (estimates.size() != truths.size())
        fail(ErrorKind::length_mismatch,
             "mae: " + std::to_string(estimates.size()) + " estimates vs " +
                 std::to_string(truths.size()) + " truths");
    if (estimates.empty()) fail(ErrorKind::empty_input, "mae: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i)
        sum += std::abs(estimates[i].predicted_accuracy - truths[i]);
    return sum / static_cast<double>(estimates.size());
}

} // namespace gepbench
