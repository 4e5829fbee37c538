#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gepbench/gep.hpp"

using namespace gepbench;

namespace {

ScoreVector sv(std::vector<double> scores) {
    ScoreVector out;
    out.scores = std::move(scores);
    return out;
}

// Brute force over a dense tau grid with step below half the smallest gap
// between distinct scores. Returns the minimal achievable |acc - frac|.
double dense_grid_min_error(const std::vector<double>& scores, double acc) {
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    double min_gap = 1.0;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] != sorted[i - 1])
            min_gap = std::min(min_gap, sorted[i] - sorted[i - 1]);
    const double step = min_gap / 2.5;
    const double n = static_cast<double>(sorted.size());
    double best = 1e300;
    std::size_t cursor = 0; // grid and scores swept together, O(#grid + n)
    for (double tau = sorted.front() - 1.0; tau <= sorted.back() + 1.0;
         tau += step) {
        while (cursor < sorted.size() && sorted[cursor] < tau) ++cursor;
        best = std::min(best, std::abs(acc - static_cast<double>(
                                                 sorted.size() - cursor) /
                                                 n));
    }
    return best;
}

} // namespace

TEST_CASE("calibrate_threshold: worked example picks tau = 0.6") {
    const Threshold t =
        calibrate_threshold({sv({0.2, 0.4, 0.6, 0.8}), 0.5});
    CHECK(t.tau == 0.6);
    CHECK(t.achieved_val_error == 0.0);
}

TEST_CASE("calibrate_threshold: acc 1.0 forces tau = min score") {
    const Threshold t =
        calibrate_threshold({sv({0.3, 0.9, 0.5, 0.7}), 1.0});
    CHECK(t.tau == 0.3);
    CHECK(t.achieved_val_error == 0.0);
}

TEST_CASE("calibrate_threshold: acc 0.0 forces tau = max score + 1") {
    const Threshold t =
        calibrate_threshold({sv({0.3, 0.9, 0.5, 0.7}), 0.0});
    CHECK(t.tau == 1.9);
    CHECK(t.achieved_val_error == 0.0);
}

TEST_CASE("calibrate_threshold: smallest minimizer wins ties") {
    // scores all equal: candidates are {0.5, 1.5}; acc 0.5 gives error 0.5
    // both ways, so the smaller tau must be returned
    const Threshold t = calibrate_threshold({sv({0.5, 0.5}), 0.5});
    CHECK(t.tau == 0.5);
    CHECK(t.achieved_val_error == doctest::Approx(0.5));
}

TEST_CASE("calibrate_threshold: empty scores is an error") {
    CHECK_THROWS_AS(calibrate_threshold({sv({}), 0.5}), Error);
}

TEST_CASE("calibrate_threshold matches dense-grid brute force on 100 cases") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.below(497);
        std::vector<double> scores(n);
        for (double& s : scores) {
            // mix of lattice-valued and continuous scores
            s = trial % 2 ? std::floor(rng.next_double() * 10.0) / 10.0
                          : rng.next_double();
        }
        const double acc = rng.next_double();
        const Threshold t = calibrate_threshold({sv(scores), acc});
        const double brute = dense_grid_min_error(scores, acc);
        CHECK(t.achieved_val_error == doctest::Approx(brute).epsilon(1e-12));
        // the 1/n bound is a theorem only when scores are distinct (every
        // count is then achievable); tied lattice scores can do worse
        if (trial % 2 == 0) CHECK(t.achieved_val_error <= 1.0 / n + 1e-12);
    }
}

TEST_CASE("predict_accuracy: boundary taus and the 2/3 count") {
    const ScoreVector s = sv({0.1, 0.5, 0.9});
    Threshold t;
    t.tau = 0.05;
    CHECK(predict_accuracy(s, t).predicted_accuracy == 1.0);
    t.tau = 0.9; // >= keeps the boundary score
    CHECK(predict_accuracy(s, t).predicted_accuracy ==
          doctest::Approx(1.0 / 3));
    t.tau = 1.5;
    CHECK(predict_accuracy(s, t).predicted_accuracy == 0.0);
    t.tau = 0.5; // comparison is >=
    CHECK(predict_accuracy(s, t).predicted_accuracy ==
          doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("predict_accuracy is nonincreasing in tau") {
    Rng rng(7);
    std::vector<double> scores(200);
    for (double& s : scores) s = rng.next_double();
    const ScoreVector s = sv(scores);
    double prev = 1.0;
    for (double tau = -0.1; tau <= 1.1; tau += 0.01) {
        Threshold t;
        t.tau = tau;
        const double p = predict_accuracy(s, t).predicted_accuracy;
        CHECK(p <= prev + 1e-15);
        prev = p;
    }
}

TEST_CASE("calibration self-consistency within 1/n") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + rng.below(200);
        std::vector<double> scores(n);
        for (double& s : scores) s = rng.next_double();
        const double acc = rng.next_double();
        const ScoreVector s = sv(scores);
        const Threshold t = calibrate_threshold({s, acc});
        const double predicted = predict_accuracy(s, t).predicted_accuracy;
        CHECK(std::abs(predicted - acc) <= 1.0 / n + 1e-12);
    }
}

TEST_CASE("true_accuracy: exact fractions and errors") {
    CHECK(true_accuracy({1, 2, 3}, {1, 2, 3}) == 1.0);
    CHECK(true_accuracy({0, 0}, {1, 1}) == 0.0);
    CHECK(true_accuracy({0, 1, 2, 2}, {0, 1, 1, 2}) == 0.75);
    CHECK_THROWS_AS(true_accuracy({1}, {1, 2}), Error);
    CHECK_THROWS_AS(true_accuracy({}, {}), Error);
}

TEST_CASE("mae: exact values and errors") {
    auto est = [](double p) {
        GepEstimate e;
        e.predicted_accuracy = p;
        return e;
    };
    CHECK(mae({est(0.5), est(0.25)}, {0.5, 0.25}) == 0.0);
    CHECK(mae({est(0.8)}, {0.7}) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(mae({est(0.9), est(0.5)}, {0.8, 0.7}) ==
          doctest::Approx(0.15).epsilon(1e-15));
    CHECK_THROWS_AS(mae({est(0.5)}, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(mae({}, {}), Error);
}
