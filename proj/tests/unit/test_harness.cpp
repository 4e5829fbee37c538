#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gepbench/config.hpp"
#include "gepbench/harness.hpp"
#include "gepbench/report_io.hpp"

using namespace gepbench;

namespace {

// Small, fast config exercising every code path.
ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.seed = 4242;
    cfg.n_seeds = 2;
    cfg.methods = {BenchMethod::conf, BenchMethod::lms, BenchMethod::ma,
                   BenchMethod::ma_eps};
    cfg.source.samples_per_class = 20; // 80 samples
    cfg.corruption_families = {CorruptionFamily::additive_noise};
    cfg.severities = {1, 3};
    cfg.train.epochs = 15;
    cfg.hidden_dims = {8};
    cfg.ensemble_m = 3;
    cfg.ensemble_eps = 0.1; // high enough to flip labels at n=64
    cfg.augmentation.count = 3;
    cfg.slab.n_samples = 200;
    cfg.sweep_sizes = {2, 3};
    return cfg;
}

std::vector<EvaluationRecord> filter(
    const std::vector<EvaluationRecord>& records,
    const std::string& condition) {
    std::vector<EvaluationRecord> out;
    for (const auto& r : records)
        if (r.condition == condition) out.push_back(r);
    return out;
}

} // namespace

TEST_CASE("aggregate: single record, hand-computed pair, duplication") {
    EvaluationRecord r{"clean", "conf", "t", 0, 0.9, 0.8, 0.1};
    const auto single = aggregate({r});
    REQUIRE(single.size() == 1);
    CHECK(single[0].mae == 0.1);
    CHECK(single[0].std_dev == 0.0);
    CHECK(single[0].n == 1);

    EvaluationRecord r2 = r;
    r2.seed_index = 1;
    r2.abs_error = 0.3;
    const auto pair = aggregate({r, r2});
    REQUIRE(pair.size() == 1);
    CHECK(pair[0].mae == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(pair[0].std_dev ==
          doctest::Approx(0.1414213562373095).epsilon(1e-12));
    CHECK(pair[0].n == 2);

    // duplicating the full multiset leaves the mean unchanged
    const auto dup = aggregate({r, r2, r, r2});
    CHECK(dup[0].mae == doctest::Approx(pair[0].mae).epsilon(1e-15));
}

TEST_CASE("aggregate groups by condition, method and target") {
    std::vector<EvaluationRecord> records = {
        {"clean", "conf", "a", 0, 0.9, 0.8, 0.1},
        {"clean", "conf", "b", 0, 0.9, 0.85, 0.05},
        {"clean", "ma", "a", 0, 0.9, 0.9, 0.0},
        {"ln", "conf", "a", 0, 0.9, 0.7, 0.2},
    };
    const auto cells = aggregate(records);
    CHECK(cells.size() == 4);
    // canonical order: condition, then method, then target
    CHECK(cells[0].condition == "clean");
    CHECK(cells[0].method == "conf");
    CHECK(cells[0].target == "a");
    CHECK(cells[3].condition == "ln");
}

TEST_CASE("shift benchmark: deterministic, consistent, self-calibrated") {
    const ExperimentConfig cfg = tiny_config();
    const RunReport a = run_shift_benchmark(cfg);
    const RunReport b = run_shift_benchmark(cfg);
    CHECK(a.records == b.records);
    CHECK(a.summary == b.summary);
    CHECK(report_to_json_text(a) == report_to_json_text(b));

    // every (condition, method, target, seed) cell appears exactly once
    std::set<std::tuple<std::string, std::string, std::string, std::uint64_t>>
        seen;
    for (const auto& r : a.records) {
        CHECK(seen.insert({r.condition, r.method, r.target, r.seed_index})
                  .second);
        CHECK(r.abs_error ==
              doctest::Approx(std::abs(r.predicted_accuracy -
                                       r.true_accuracy)).epsilon(1e-15));
        CHECK(r.true_accuracy >= 0.0);
        CHECK(r.true_accuracy <= 1.0);
        CHECK(r.predicted_accuracy >= 0.0);
        CHECK(r.predicted_accuracy <= 1.0);
    }
    // 4 methods x (val + id + near + far + 2 corruptions) x 2 seeds
    CHECK(a.records.size() == 4 * 6 * 2);

    // summary is recomputable from the records
    CHECK(a.summary == aggregate(a.records));

    // records are in canonical order
    auto sorted = a.records;
    std::sort(sorted.begin(), sorted.end(),
              [](const EvaluationRecord& x, const EvaluationRecord& y) {
                  return std::tie(x.condition, x.method, x.target,
                                  x.seed_index) <
                         std::tie(y.condition, y.method, y.target,
                                  y.seed_index);
              });
    CHECK(a.records == sorted);
}

TEST_CASE("seed isolation: fewer seeds reproduce a prefix of the records") {
    ExperimentConfig cfg = tiny_config();
    cfg.methods = {BenchMethod::conf};
    cfg.n_seeds = 3;
    const RunReport big = run_shift_benchmark(cfg);
    cfg.n_seeds = 2;
    const RunReport small = run_shift_benchmark(cfg);
    for (const auto& r : small.records) {
        const auto it = std::find(big.records.begin(), big.records.end(), r);
        CHECK(it != big.records.end());
    }
    CHECK(small.records.size() ==
          big.records.size() / 3 * 2);
}

TEST_CASE("val records satisfy the self-consistency bound") {
    const ExperimentConfig cfg = tiny_config();
    const RunReport report = run_shift_benchmark(cfg);
    const double n_val =
        static_cast<double>(cfg.source.samples_per_class) *
        cfg.source.n_classes * cfg.val_fraction;
    std::size_t val_records = 0;
    for (const auto& r : report.records)
        if (r.target == "val") {
            ++val_records;
            CHECK(r.abs_error <= 1.0 / n_val + 1e-12);
        }
    CHECK(val_records == 4 * 2);
}

TEST_CASE("fidelity: clean block equals the shift benchmark on shared targets") {
    ExperimentConfig cfg = tiny_config();
    cfg.methods = {BenchMethod::conf, BenchMethod::ma};
    const RunReport shift = run_shift_benchmark(cfg);
    const RunReport fidelity = run_fidelity_benchmark(cfg);

    const auto clean = filter(fidelity.records, "clean");
    std::vector<EvaluationRecord> shift_shared;
    for (const auto& r : shift.records)
        if (r.target == "val" || r.target == "id_test" ||
            r.target == "shift:near" || r.target == "shift:far")
            shift_shared.push_back(r);
    CHECK(clean == shift_shared);
}

TEST_CASE("fidelity: every condition block is present and distinct") {
    ExperimentConfig cfg = tiny_config();
    cfg.methods = {BenchMethod::conf};
    cfg.source.samples_per_class = 30;
    const RunReport report = run_fidelity_benchmark(cfg);
    for (const char* cond :
         {"clean", "label_noise", "measurement_noise", "undersample"}) {
        const auto block = filter(report.records, cond);
        CHECK(block.size() == 4 * cfg.n_seeds); // 4 targets x seeds
    }
    // transformed training data must change at least one record
    CHECK(filter(report.records, "clean") !=
          filter(report.records, "measurement_noise"));
}

TEST_CASE("sweep: degenerate size list reproduces the shift benchmark") {
    ExperimentConfig cfg = tiny_config();
    cfg.methods = {BenchMethod::ma};
    const RunReport shift = run_shift_benchmark(cfg);
    const RunReport sweep = run_ensemble_sweep(cfg, {cfg.ensemble_m});

    REQUIRE(sweep.records.size() == shift.records.size());
    for (std::size_t i = 0; i < sweep.records.size(); ++i) {
        const auto& s = sweep.records[i];
        const auto& r = shift.records[i];
        CHECK(s.condition == "M=3");
        CHECK(r.condition == "clean");
        CHECK(s.method == r.method);
        CHECK(s.target == r.target);
        CHECK(s.seed_index == r.seed_index);
        CHECK(s.true_accuracy == r.true_accuracy);
        CHECK(s.predicted_accuracy == r.predicted_accuracy);
    }
}

TEST_CASE("sweep: size-k rows use exactly the first k members") {
    const ExperimentConfig cfg = tiny_config();
    const RunReport both = run_ensemble_sweep(cfg, {2, 3});
    const RunReport only2 = run_ensemble_sweep(cfg, {2});
    CHECK(filter(both.records, "M=2") == only2.records);
}

TEST_CASE("simplicity bias: both conditions, reliance probes present") {
    ExperimentConfig cfg = tiny_config();
    cfg.methods = {BenchMethod::conf};
    cfg.train.epochs = 40;
    const RunReport report = run_simplicity_bias(cfg, cfg.slab);

    for (const char* cond : {"biased", "scrambled_train"}) {
        const auto block = filter(report.records, cond);
        // targets: val, slab:train, slab:id_test, slab:scrambled_id_test,
        // slab:shifted
        CHECK(block.size() == 5 * cfg.n_seeds);
    }
    // unshifted evaluation stays within the calibration bound
    const double n_val = cfg.slab.n_samples * cfg.val_fraction;
    for (const auto& r : report.records)
        if (r.target == "val")
            CHECK(r.abs_error <= 1.0 / n_val + 1e-12);
    CHECK(report.summary == aggregate(report.records));
}

TEST_CASE("runners echo the canonical config") {
    ExperimentConfig cfg = tiny_config();
    cfg.methods = {BenchMethod::conf};
    cfg.n_seeds = 1;
    const RunReport report = run_shift_benchmark(cfg);
    CHECK(report.config_echo == config_to_json_text(cfg));
    CHECK(report.bench_name == "bench-shift");
    CHECK(report.wall_clock_seconds > 0.0);
}
