#pragma once

#include <string>
#include <vector>

#include "gepbench/scoring.hpp"

namespace gepbench {

struct CalibrationInput {
    ScoreVector val_scores;
    double val_accuracy = 0.0; // fraction the scored predictor gets right
};

struct Threshold {
    double tau = 0.0;
    double achieved_val_error = 0.0;
};

struct GepEstimate {
    double predicted_accuracy = 0.0;
    double tau = 0.0;
    std::string method;
    std::string target;
};

// Minimizes |acc_val - (1/n) * #{i : s_i >= tau}| exactly over the candidate
// set (unique score values plus max score + 1, which covers all n+1
// achievable count regions). Among minimizers, returns the smallest tau.
Threshold calibrate_threshold(const CalibrationInput& input);

// predicted accuracy = (1/n) * #{i : s_i >= tau}; same >= as calibration.
GepEstimate predict_accuracy(const ScoreVector& scores,
                             const Threshold& threshold,
                             const std::string& target_tag = "");

// Fraction of positions where prediction == label.
double true_accuracy(const std::vector<int>& predictions,
                     const std::vector<int>& labels);

double mae(const std::vector<GepEstimate>& estimates,
           const std::vector<double>& truths);

} // namespace gepbench
