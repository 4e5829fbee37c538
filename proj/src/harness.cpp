#include "gepbench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <optional>

#include "gepbench/config.hpp"

namespace gepbench {

std::string to_string(BenchMethod m) {
    switch (m) {
        case BenchMethod::conf: return "conf";
        case BenchMethod::lms: return "lms";
        case BenchMethod::ma: return "ma";
        case BenchMethod::ma_eps: return "ma_eps";
    }
    fail(ErrorKind::invalid_argument, "unknown bench method");
}

std::string to_string(FidelityCondition c) {
    switch (c) {
        case FidelityCondition::clean: return "clean";
        case FidelityCondition::label_noise: return "label_noise";
        case FidelityCondition::measurement_noise: return "measurement_noise";
        case FidelityCondition::undersample: return "undersample";
    }
    fail(ErrorKind::invalid_argument, "unknown fidelity condition");
}

void ExperimentConfig::validate() const {
    if (n_seeds < 1) fail(ErrorKind::invalid_argument, "n_seeds >= 1");
    if (methods.empty()) fail(ErrorKind::invalid_argument, "methods nonempty");
    source.validate();
    train.validate();
    augmentation.validate();
    slab.validate();
    if (!(near_magnitude >= 0.0) || !(far_magnitude >= 0.0))
        fail(ErrorKind::invalid_argument, "shift magnitudes >= 0");
    if (!(near_magnitude < far_magnitude))
        fail(ErrorKind::invalid_argument, "near magnitude must be < far");
    for (int sev : severities)
        if (sev < 1 || sev > 5)
            fail(ErrorKind::invalid_argument, "severity outside 1..5");
    if (!(train_fraction > 0.0) || !(val_fraction > 0.0) ||
        std::abs(train_fraction + val_fraction - 1.0) > 1e-9)
        fail(ErrorKind::invalid_argument,
             "train/val fractions must be positive and sum to 1");
    if (ensemble_m < 1) fail(ErrorKind::invalid_argument, "ensemble m >= 1");
    if (!(ensemble_eps >= 0.0 && ensemble_eps <= 1.0))
        fail(ErrorKind::invalid_argument, "ensemble eps in [0,1]");
    if (!(label_noise_rate >= 0.0 && label_noise_rate <= 1.0))
        fail(ErrorKind::invalid_argument, "label_noise_rate in [0,1]");
    if (!(undersample_fraction >= 0.0 && undersample_fraction <= 1.0))
        fail(ErrorKind::invalid_argument, "undersample_fraction in [0,1]");
    for (std::size_t sz : sweep_sizes)
        if (sz < 1) fail(ErrorKind::invalid_argument, "sweep sizes >= 1");
    for (std::size_t h : hidden_dims)
        if (h < 1) fail(ErrorKind::invalid_argument, "hidden dims >= 1");
}

std::vector<std::size_t> ExperimentConfig::layer_dims() const {
    std::vector<std::size_t> dims;
    dims.push_back(source.n_features);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(static_cast<std::size_t>(source.n_classes));
    return dims;
}

std::uint64_t derive_seed(const ExperimentConfig& cfg, std::size_t seed_index,
                          std::uint64_t purpose) {
    return Rng(cfg.seed).split(seed_index).split_seed(purpose);
}

std::vector<SummaryCell> aggregate(
    const std::vector<EvaluationRecord>& records) {
    if (records.empty()) fail(ErrorKind::empty_input, "aggregate: no records");
    std::map<std::tuple<std::string, std::string, std::string>,
             std::vector<const EvaluationRecord*>>
        groups;
    for (const auto& r : records)
        groups[{r.condition, r.method, r.target}].push_back(&r);

    std::vector<SummaryCell> out;
    for (const auto& [key, rs] : groups) {
        SummaryCell cell;
        std::tie(cell.condition, cell.method, cell.target) = key;
        cell.n = rs.size();
        double sum = 0.0, gap = 0.0;
        for (const auto* r : rs) {
            sum += r->abs_error;
            gap += r->predicted_accuracy - r->true_accuracy;
        }
        cell.mae = sum / static_cast<double>(cell.n);
        cell.mean_gap = gap / static_cast<double>(cell.n);
        if (cell.n > 1) {
            double ss = 0.0;
            for (const auto* r : rs) {
                const double d = r->abs_error - cell.mae;
                ss += d * d;
            }
            cell.std_dev = std::sqrt(ss / static_cast<double>(cell.n - 1));
        }
        out.push_back(std::move(cell));
    }
    return out; // std::map iteration is already canonical order
}

namespace {

using Targets = std::vector<std::pair<std::string, LabeledDataset>>;

// One deployed predictor plus its scoring function.
struct Scorer {
    std::string name;
    std::function<ScoreVector(const LabeledDataset&)> score;
    std::function<std::vector<int>(const LabeledDataset&)> predict_labels;
};

void evaluate_scorer(const Scorer& scorer, const std::string& condition,
                     std::size_t seed_index, const LabeledDataset& val,
                     const Targets& targets,
                     std::vector<EvaluationRecord>& out) {
    const ScoreVector val_scores = scorer.score(val);
    const double acc_val =
        true_accuracy(scorer.predict_labels(val), val.labels);
    const Threshold tau = calibrate_threshold({val_scores, acc_val});

    auto record = [&](const std::string& tag, const ScoreVector& scores,
                      double truth) {
        const GepEstimate est = predict_accuracy(scores, tau, tag);
        out.push_back({condition, scorer.name, tag, seed_index, truth,
                       est.predicted_accuracy,
                       std::abs(est.predicted_accuracy - truth)});
    };
    record("val", val_scores, acc_val);
    for (const auto& [tag, data] : targets)
        record(tag, scorer.score(data),
               true_accuracy(scorer.predict_labels(data), data.labels));
}

Scorer make_model_scorer(const std::string& name, const MlpModel& model,
                         const AugmentationPolicy* lms_policy) {
    Scorer s;
    s.name = name;
    if (lms_policy) {
        const AugmentationPolicy policy = *lms_policy;
        s.score = [&model, policy](const LabeledDataset& d) {
            return lms_score(model, d, policy);
        };
    } else {
        s.score = [&model](const LabeledDataset& d) {
            return conf_score(model, d);
        };
    }
    s.predict_labels = [&model](const LabeledDataset& d) {
        return predict(model, d);
    };
    return s;
}

Scorer make_ensemble_scorer(const std::string& name, const Ensemble& ens) {
    Scorer s;
    s.name = name;
    s.score = [&ens](const LabeledDataset& d) { return ma_score(ens, d); };
    s.predict_labels = [&ens](const LabeledDataset& d) {
        return ensemble_predict(ens, d);
    };
    return s;
}

bool wants(const std::vector<BenchMethod>& methods, BenchMethod m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

// Shared per-seed data layout for the shift-style runners.
struct SeedData {
    LabeledDataset train;
    LabeledDataset val;
    Targets targets;
};

SeedData build_seed_data(const ExperimentConfig& cfg, std::size_t s,
                         bool with_corruptions) {
    SourceSpec src = cfg.source;
    src.seed = derive_seed(cfg, s, stream::source);
    const LabeledDataset source = make_source(src);
    auto [train, val] = split(source, cfg.train_fraction, cfg.val_fraction,
                              derive_seed(cfg, s, stream::data_split));

    SeedData data;
    data.train = std::move(train);
    data.val = std::move(val);

    LabeledDataset id_test = make_target(
        src, {ShiftKind::near, 0.0, derive_seed(cfg, s, stream::id_test)});
    LabeledDataset near = make_target(
        src, {ShiftKind::near, cfg.near_magnitude,
              derive_seed(cfg, s, stream::shift_near)});
    LabeledDataset far = make_target(
        src, {ShiftKind::far, cfg.far_magnitude,
              derive_seed(cfg, s, stream::shift_far)});

    if (with_corruptions) {
        for (std::size_t f = 0; f < cfg.corruption_families.size(); ++f) {
            const CorruptionFamily family = cfg.corruption_families[f];
            // one noise seed per family: severity only scales the recipe
            const std::uint64_t seed =
                derive_seed(cfg, s, stream::corrupt_base + f);
            for (int sev : cfg.severities) {
                CorruptionSpec spec{family, sev, seed};
                data.targets.emplace_back(
                    "corrupt:" + to_string(family) + ":" + std::to_string(sev),
                    make_corrupted(id_test, spec));
            }
        }
    }
    data.targets.emplace_back("id_test", std::move(id_test));
    data.targets.emplace_back("shift:near", std::move(near));
    data.targets.emplace_back("shift:far", std::move(far));
    return data;
}

AugmentationPolicy seed_policy(const ExperimentConfig& cfg, std::size_t s) {
    AugmentationPolicy policy = cfg.augmentation;
    policy.seed = derive_seed(cfg, s, stream::lms_policy);
    return policy;
}

// Trains whichever predictors the method set needs on the given train split.
struct Predictors {
    std::optional<MlpModel> model;
    std::optional<Ensemble> ens;
    std::optional<Ensemble> ens_eps;
};

Predictors train_predictors(const ExperimentConfig& cfg, std::size_t s,
                            const LabeledDataset& train_data,
                            const std::vector<std::size_t>& dims) {
    Predictors p;
    TrainConfig tc = cfg.train;
    if (wants(cfg.methods, BenchMethod::conf) ||
        wants(cfg.methods, BenchMethod::lms)) {
        tc.seed = derive_seed(cfg, s, stream::train_single);
        p.model = train_sgd(train_data, tc, dims, cfg.activation);
    }
    if (wants(cfg.methods, BenchMethod::ma)) {
        tc.seed = derive_seed(cfg, s, stream::ensemble);
        p.ens = train_ensemble(train_data, tc, dims, cfg.ensemble_m, 0.0,
                               cfg.activation);
    }
    if (wants(cfg.methods, BenchMethod::ma_eps)) {
        tc.seed = derive_seed(cfg, s, stream::ensemble_eps);
        p.ens_eps = train_ensemble(train_data, tc, dims, cfg.ensemble_m,
                                   cfg.ensemble_eps, cfg.activation);
    }
    return p;
}

void evaluate_all_methods(const ExperimentConfig& cfg, std::size_t s,
                          const std::string& condition, const Predictors& p,
                          const AugmentationPolicy& policy,
                          const LabeledDataset& val, const Targets& targets,
                          std::vector<EvaluationRecord>& out) {
    for (BenchMethod m : cfg.methods) {
        switch (m) {
            case BenchMethod::conf:
                evaluate_scorer(make_model_scorer("conf", *p.model, nullptr),
                                condition, s, val, targets, out);
                break;
            case BenchMethod::lms:
                evaluate_scorer(make_model_scorer("lms", *p.model, &policy),
                                condition, s, val, targets, out);
                break;
            case BenchMethod::ma:
                evaluate_scorer(make_ensemble_scorer("ma", *p.ens), condition,
                                s, val, targets, out);
                break;
            case BenchMethod::ma_eps:
                evaluate_scorer(make_ensemble_scorer("ma_eps", *p.ens_eps),
                                condition, s, val, targets, out);
                break;
        }
    }
}

void sort_canonical(std::vector<EvaluationRecord>& records) {
    std::sort(records.begin(), records.end(),
              [](const EvaluationRecord& a, const EvaluationRecord& b) {
                  return std::tie(a.condition, a.method, a.target,
                                  a.seed_index) <
                         std::tie(b.condition, b.method, b.target,
                                  b.seed_index);
              });
}

// Runs fn(seed) over all seeds, possibly in parallel; a failed seed aborts
// the whole run with its index attached.
std::vector<EvaluationRecord> for_each_seed(
    std::size_t n_seeds,
    const std::function<std::vector<EvaluationRecord>(std::size_t)>& fn) {
    std::vector<std::vector<EvaluationRecord>> per_seed(n_seeds);
    std::exception_ptr err;
    std::size_t err_seed = 0;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t s = 0; s < n_seeds; ++s) {
        try {
            per_seed[s] = fn(s);
        } catch (...) {
#pragma omp critical
            if (!err) {
                err = std::current_exception();
                err_seed = s;
            }
        }
    }
    if (err) {
        try {
            std::rethrow_exception(err);
        } catch (const Error& e) {
            fail(e.kind(),
                 "seed " + std::to_string(err_seed) + ": " + e.what());
        } catch (const std::exception& e) {
            fail(ErrorKind::io,
                 "seed " + std::to_string(err_seed) + ": " + e.what());
        }
    }
    std::vector<EvaluationRecord> all;
    for (auto& v : per_seed)
        all.insert(all.end(), v.begin(), v.end());
    return all;
}

RunReport finalize_report(const ExperimentConfig& cfg,
                          const std::string& bench_name,
                          std::vector<EvaluationRecord> records,
                          std::chrono::steady_clock::time_point start) {
    sort_canonical(records);
    RunReport report;
    report.bench_name = bench_name;
    report.config_echo = config_to_json_text(cfg);
    report.summary = aggregate(records);
    report.records = std::move(records);
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
}

} // namespace

RunReport run_shift_benchmark(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto dims = cfg.layer_dims();
    auto records = for_each_seed(cfg.n_seeds, [&](std::size_t s) {
        const SeedData data = build_seed_data(cfg, s, true);
        const Predictors p = train_predictors(cfg, s, data.train, dims);
        std::vector<EvaluationRecord> out;
        evaluate_all_methods(cfg, s, "clean", p, seed_policy(cfg, s), data.val,
                             data.targets, out);
        return out;
    });
    return finalize_report(cfg, "bench-shift", std::move(records), start);
}

RunReport run_fidelity_benchmark(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.fidelity.empty())
        fail(ErrorKind::invalid_argument, "fidelity conditions nonempty");
    const auto start = std::chrono::steady_clock::now();
    const auto dims = cfg.layer_dims();
    auto records = for_each_seed(cfg.n_seeds, [&](std::size_t s) {
        const SeedData data = build_seed_data(cfg, s, false);
        std::vector<EvaluationRecord> out;
        for (FidelityCondition cond : cfg.fidelity) {
            LabeledDataset train_data = data.train;
            switch (cond) {
                case FidelityCondition::clean:
                    break;
                case FidelityCondition::label_noise:
                    train_data = inject_label_noise(
                        train_data,
                        {cfg.label_noise_rate,
                         derive_seed(cfg, s, stream::corrupt_base + 16)});
                    break;
                case FidelityCondition::measurement_noise:
                    train_data = inject_measurement_noise(
                        train_data,
                        {cfg.blur_sigma, cfg.additive_sigma,
                         derive_seed(cfg, s, stream::corrupt_base + 17)});
                    break;
                case FidelityCondition::undersample:
                    train_data = undersample(
                        train_data,
                        {cfg.undersample_classes, cfg.undersample_fraction,
                         derive_seed(cfg, s, stream::corrupt_base + 18)});
                    break;
            }
            const Predictors p = train_predictors(cfg, s, train_data, dims);
            evaluate_all_methods(cfg, s, to_string(cond), p,
                                 seed_policy(cfg, s), data.val, data.targets,
                                 out);
        }
        return out;
    });
    return finalize_report(cfg, "bench-fidelity", std::move(records), start);
}

RunReport run_ensemble_sweep(const ExperimentConfig& cfg,
                             const std::vector<std::size_t>& sizes) {
    cfg.validate();
    if (sizes.empty()) fail(ErrorKind::invalid_argument, "sizes nonempty");
    for (std::size_t sz : sizes)
        if (sz < 1) fail(ErrorKind::invalid_argument, "sizes >= 1");
    const std::size_t max_size = *std::max_element(sizes.begin(), sizes.end());
    const auto start = std::chrono::steady_clock::now();
    const auto dims = cfg.layer_dims();
    auto records = for_each_seed(cfg.n_seeds, [&](std::size_t s) {
        const SeedData data = build_seed_data(cfg, s, true);
        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(cfg, s, stream::ensemble);
        const Ensemble full = train_ensemble(data.train, tc, dims, max_size,
                                             0.0, cfg.activation);
        std::vector<EvaluationRecord> out;
        for (std::size_t sz : sizes) {
            Ensemble prefix;
            prefix.diversity_noise = 0.0;
            prefix.members.assign(full.members.begin(),
                                  full.members.begin() +
                                      static_cast<std::ptrdiff_t>(sz));
            evaluate_scorer(make_ensemble_scorer("ma", prefix),
                            "M=" + std::to_string(sz), s, data.val,
                            data.targets, out);
        }
        return out;
    });
    return finalize_report(cfg, "sweep-ensemble", std::move(records), start);
}

RunReport run_simplicity_bias(const ExperimentConfig& cfg,
                              const SlabSpec& slab) {
    cfg.validate();
    slab.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::size_t> dims;
    dims.push_back(2);
    dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
    dims.push_back(2);

    auto records = for_each_seed(cfg.n_seeds, [&](std::size_t s) {
        SlabSpec spec = slab;
        spec.shift_simple_feature = false;
        spec.seed = derive_seed(cfg, s, stream::slab_train);
        const LabeledDataset full = make_slab(spec);
        auto [train_part, val] =
            split(full, cfg.train_fraction, cfg.val_fraction,
                  derive_seed(cfg, s, stream::data_split));

        spec.seed = derive_seed(cfg, s, stream::slab_id_test);
        LabeledDataset id_test = make_slab(spec);

        SlabSpec shifted = slab;
        shifted.shift_simple_feature = true;
        shifted.seed = derive_seed(cfg, s, stream::slab_target);
        LabeledDataset target = make_slab(shifted);

        Targets targets;
        targets.emplace_back(
            "slab:scrambled_id_test",
            scramble_feature(id_test, 0,
                             derive_seed(cfg, s, stream::scramble_test)));
        targets.emplace_back("slab:id_test", std::move(id_test));
        targets.emplace_back("slab:shifted", std::move(target));

        // training-set accuracy probe target (reliance verification)
        targets.emplace_back("slab:train", train_part);

        std::vector<EvaluationRecord> out;
        const AugmentationPolicy policy = seed_policy(cfg, s);
        for (const bool scrambled : {false, true}) {
            LabeledDataset train_data =
                scrambled
                    ? scramble_feature(
                          train_part, 0,
                          derive_seed(cfg, s, stream::scramble_train))
                    : train_part;
            const Predictors p = train_predictors(cfg, s, train_data, dims);
            evaluate_all_methods(cfg, s,
                                 scrambled ? "scrambled_train" : "biased", p,
                                 policy, val, targets, out);
        }
        return out;
    });
    return finalize_report(cfg, "bench-slab", std::move(records), start);
}

} // namespace gepbench
