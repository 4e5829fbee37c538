#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gepbench/config.hpp"
#include "gepbench/gep.hpp"
#include "gepbench/io_binary.hpp"
#include "gepbench/io_csv.hpp"
#include "gepbench/logits.hpp"
#include "gepbench/model_io.hpp"
#include "gepbench/report_io.hpp"

using namespace gepbench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::missing_file, "cannot open: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::schema, path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (!path.parent_path().empty())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out << text;
}

void set_jobs(std::optional<int> jobs) {
    if (!jobs) {
        if (const char* env = std::getenv("GEP_BENCH_JOBS")) {
            const int n = std::atoi(env);
            if (n >= 1) jobs = n;
        }
    }
#ifdef _OPENMP
    if (jobs) omp_set_num_threads(*jobs);
#else
    (void)jobs;
#endif
}

struct BenchArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    bool verbose = false;
};

void add_bench_options(CLI::App* sub, BenchArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config JSON")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory")->required();
    sub->add_option("--seed", args.seed, "override the config's master seed");
    sub->add_option("--jobs", args.jobs,
                    "worker thread cap (default: GEP_BENCH_JOBS or OpenMP)");
    sub->add_flag("-v,--verbose", args.verbose, "print progress to stderr");
}

void save_dataset(const LabeledDataset& data, const fs::path& dir) {
    fs::create_directories(dir);
    save_dataset_csv(data, dir / "dataset.csv");
    write_matrix(data.features, dir / "features.gepb");
    Matrix labels(data.n_samples(), 1);
    for (std::size_t i = 0; i < data.n_samples(); ++i)
        labels(i, 0) = static_cast<double>(data.labels[i]);
    write_matrix(labels, dir / "labels.gepb");
    json meta = {{"n_classes", data.n_classes},
                 {"n_samples", data.n_samples()},
                 {"n_features", data.n_features()},
                 {"provenance", data.provenance}};
    write_text(dir / "meta.json", meta.dump(2) + "\n");
}

// Finishes a bench run: report files, run manifest, timing note.
void finish_bench(const RunReport& report, const ExperimentConfig& cfg,
                  const BenchArgs& args) {
    const fs::path dir(args.out_dir);
    auto written = emit_report(report, dir);
    json manifest;
    manifest["bench"] = report.bench_name;
    manifest["config_hash"] = config_hash(cfg);
    json seeds = json::array();
    for (std::size_t s = 0; s < cfg.n_seeds; ++s) seeds.push_back(s);
    manifest["seeds"] = seeds;
    json artifacts = json::array();
    for (const auto& p : written)
        artifacts.push_back(p.filename().string());
    manifest["artifacts"] = artifacts;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    // wall clock lives outside the deterministic JSON/CSV/SVG set
    write_text(dir / "timing.txt",
               "wall_clock_seconds " +
                   std::to_string(report.wall_clock_seconds) + "\n");
    if (args.verbose)
        std::cerr << report.bench_name << ": " << report.records.size()
                  << " records in " << report.wall_clock_seconds << "s\n";
}

ExperimentConfig load_bench_config(const BenchArgs& args) {
    ExperimentConfig cfg = load_experiment_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    return cfg;
}

int run_gen(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
    const json j = load_json_file(config_path);
    for (const auto& [key, _] : j.items())
        if (key != "source" && key != "slab" && key != "seed" &&
            key != "transforms")
            fail(ErrorKind::schema, "gen config: unknown key '" + key + "'");
    std::uint64_t seed = j.value("seed", 0ull);
    if (seed_override) seed = *seed_override;

    LabeledDataset data;
    if (j.contains("source") == j.contains("slab"))
        fail(ErrorKind::schema,
             "gen config: exactly one of 'source' or 'slab' required");
    if (j.contains("source")) {
        const json& s = j["source"];
        SourceSpec spec;
        spec.n_classes = s.value("n_classes", spec.n_classes);
        spec.n_features = s.value("n_features", spec.n_features);
        spec.samples_per_class =
            s.value("samples_per_class", spec.samples_per_class);
        spec.cluster_separation =
            s.value("cluster_separation", spec.cluster_separation);
        spec.within_class_spread =
            s.value("within_class_spread", spec.within_class_spread);
        spec.seed = seed;
        spec.validate();
        if (s.contains("shift")) {
            ShiftSpec shift;
            const json& sh = s["shift"];
            shift.kind = sh.value("kind", std::string("near")) == "far"
                             ? ShiftKind::far
                             : ShiftKind::near;
            shift.magnitude = sh.value("magnitude", 0.5);
            shift.seed = Rng(seed).split_seed(1);
            data = make_target(spec, shift);
        } else {
            data = make_source(spec);
        }
    } else {
        const json& s = j["slab"];
        SlabSpec spec;
        spec.n_samples = s.value("n_samples", spec.n_samples);
        spec.simple_feature_margin =
            s.value("simple_feature_margin", spec.simple_feature_margin);
        spec.n_slabs = s.value("n_slabs", spec.n_slabs);
        spec.slab_noise = s.value("slab_noise", spec.slab_noise);
        spec.shift_simple_feature = s.value("shift_simple_feature", false);
        spec.seed = seed;
        spec.validate();
        data = make_slab(spec);
    }

    if (j.contains("transforms")) {
        std::uint64_t tseed = Rng(seed).split_seed(100);
        for (const auto& t : j["transforms"]) {
            const auto op = t.at("op").get<std::string>();
            tseed = Rng(tseed).split_seed(7);
            if (op == "label_noise") {
                data = inject_label_noise(data, {t.value("rate", 0.05), tseed});
            } else if (op == "measurement_noise") {
                data = inject_measurement_noise(
                    data, {t.value("blur_sigma", 0.5),
                           t.value("additive_sigma", 0.07), tseed});
            } else if (op == "undersample") {
                UndersampleSpec spec;
                spec.drop_fraction = t.value("drop_fraction", 0.2);
                for (const auto& c : t.at("classes"))
                    spec.target_classes.insert(c.get<int>());
                spec.seed = tseed;
                data = undersample(data, spec);
            } else if (op == "corrupt") {
                CorruptionSpec spec;
                const auto family = t.at("family").get<std::string>();
                if (family == "additive_noise")
                    spec.family = CorruptionFamily::additive_noise;
                else if (family == "feature_blur")
                    spec.family = CorruptionFamily::feature_blur;
                else if (family == "feature_dropout")
                    spec.family = CorruptionFamily::feature_dropout;
                else if (family == "affine_warp")
                    spec.family = CorruptionFamily::affine_warp;
                else
                    fail(ErrorKind::schema,
                         "gen config: unknown corruption family '" + family +
                             "'");
                spec.severity = t.value("severity", 1);
                spec.seed = tseed;
                data = make_corrupted(data, spec);
            } else {
                fail(ErrorKind::schema,
                     "gen config: unknown transform op '" + op + "'");
            }
        }
    }
    save_dataset(data, out_dir);
    return 0;
}

int run_train(const std::string& config_path, const std::string& data_path,
              const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
    const json j = load_json_file(config_path);
    for (const auto& [key, _] : j.items())
        if (key != "train" && key != "seed" && key != "ensemble")
            fail(ErrorKind::schema, "train config: unknown key '" + key + "'");

    TrainConfig cfg;
    std::vector<std::size_t> hidden = {32};
    Activation act = Activation::relu;
    if (j.contains("train")) {
        const json& t = j["train"];
        cfg.epochs = t.value("epochs", cfg.epochs);
        cfg.learning_rate = t.value("learning_rate", cfg.learning_rate);
        cfg.batch_size = t.value("batch_size", cfg.batch_size);
        cfg.weight_decay = t.value("weight_decay", cfg.weight_decay);
        if (t.contains("hidden_dims"))
            hidden = t["hidden_dims"].get<std::vector<std::size_t>>();
        if (t.contains("activation"))
            act = t["activation"].get<std::string>() == "tanh"
                      ? Activation::tanh
                      : Activation::relu;
    }
    cfg.seed = j.value("seed", 0ull);
    if (seed_override) cfg.seed = *seed_override;
    cfg.validate();

    const LabeledDataset data = load_dataset_csv(data_path);
    std::vector<std::size_t> dims;
    dims.push_back(data.n_features());
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(static_cast<std::size_t>(data.n_classes));

    if (j.contains("ensemble")) {
        const std::size_t m = j["ensemble"].value("m", 10);
        const double eps = j["ensemble"].value("eps", 0.0);
        save_ensemble(train_ensemble(data, cfg, dims, m, eps, act), out_dir);
    } else {
        save_model(train_sgd(data, cfg, dims, act), out_dir);
    }
    return 0;
}

int run_score(const std::string& method, const std::string& data_path,
              const std::string& model_dir, const std::string& ensemble_dir,
              const std::string& logits_manifest, const std::string& out_path,
              const AugmentationPolicy& policy) {
    ScoreVector scores;
    if (!logits_manifest.empty()) {
        if (method == "lms")
            fail(ErrorKind::invalid_argument,
                 "lms cannot be computed from logits (needs model + inputs)");
        const LogitsBundle bundle = ingest_logits(logits_manifest);
        if (method == "conf") {
            if (bundle.n_members() != 1)
                fail(ErrorKind::invalid_argument,
                     "conf from logits expects a single-member bundle, got " +
                         std::to_string(bundle.n_members()));
            scores = conf_score_from_logits(bundle.member_logits[0]);
        } else {
            scores = ma_score_from_logits(bundle.member_logits);
        }
    } else {
        if (data_path.empty())
            fail(ErrorKind::invalid_argument,
                 "--data is required unless --logits is given");
        const LabeledDataset data = load_dataset_csv(data_path);
        if (method == "ma") {
            if (ensemble_dir.empty())
                fail(ErrorKind::invalid_argument, "ma needs --ensemble");
            scores = ma_score(load_ensemble(ensemble_dir), data);
        } else {
            if (model_dir.empty())
                fail(ErrorKind::invalid_argument,
                     method + " needs --model");
            const MlpModel model = load_model(model_dir);
            scores = method == "conf" ? conf_score(model, data)
                                      : lms_score(model, data, policy);
        }
    }
    fs::create_directories(fs::path(out_path).parent_path().empty()
                               ? "."
                               : fs::path(out_path).parent_path());
    save_scores_csv(scores, out_path);
    // binary twin next to the CSV
    save_scores_gepb(scores, fs::path(out_path).replace_extension(".gepb"));
    return 0;
}

int run_calibrate(const std::string& scores_path, double acc_val,
                  const std::string& out_path) {
    CalibrationInput input;
    input.val_scores.scores = load_scores_csv(scores_path);
    input.val_accuracy = acc_val;
    const Threshold tau = calibrate_threshold(input);
    json out = {{"tau", tau.tau},
                {"achieved_val_error", tau.achieved_val_error}};
    write_text(out_path, out.dump(2) + "\n");
    return 0;
}

int run_predict(const std::string& scores_path,
                const std::string& threshold_path, const std::string& target,
                const std::string& out_path) {
    const json tj = load_json_file(threshold_path);
    if (!tj.contains("tau"))
        fail(ErrorKind::schema, threshold_path + ": missing 'tau'");
    Threshold tau;
    tau.tau = tj["tau"].get<double>();
    tau.achieved_val_error = tj.value("achieved_val_error", 0.0);
    ScoreVector scores;
    scores.scores = load_scores_csv(scores_path);
    const GepEstimate est = predict_accuracy(scores, tau, target);
    json out = {{"predicted_accuracy", est.predicted_accuracy},
                {"tau", est.tau},
                {"method", est.method},
                {"target", est.target}};
    write_text(out_path, out.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalization error predictor benchmark toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    std::string gen_config, gen_out;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--config", gen_config, "generator config JSON")->required();
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--seed", gen_seed, "override the config's seed");

    // train
    auto* train = app.add_subcommand("train", "train a model or ensemble");
    std::string train_config, train_data, train_out;
    std::optional<std::uint64_t> train_seed;
    std::optional<int> train_jobs;
    train->add_option("--config", train_config, "training config JSON")
        ->required();
    train->add_option("--data", train_data, "training dataset CSV")->required();
    train->add_option("--out", train_out, "output model directory")->required();
    train->add_option("--seed", train_seed, "override the config's seed");
    train->add_option("--jobs", train_jobs, "worker thread cap");

    // score
    auto* score = app.add_subcommand("score", "compute per-sample scores");
    std::string score_method, score_data, score_model, score_ensemble,
        score_logits, score_out;
    AugmentationPolicy score_policy;
    score->add_option("--method", score_method, "conf | lms | ma")
        ->required()
        ->check(CLI::IsMember({"conf", "lms", "ma"}));
    score->add_option("--data", score_data, "dataset CSV to score");
    score->add_option("--model", score_model, "model directory (conf/lms)");
    score->add_option("--ensemble", score_ensemble, "ensemble directory (ma)");
    score->add_option("--logits", score_logits,
                      "logits bundle manifest (conf/ma, replaces model+data)");
    score->add_option("--out", score_out, "output scores CSV")->required();
    score->add_option("--k", score_policy.count, "lms augmentation count");
    score->add_option("--jitter-sigma", score_policy.jitter_sigma,
                      "lms jitter std");
    score->add_option("--scale-low", score_policy.scale_low, "lms scale low");
    score->add_option("--scale-high", score_policy.scale_high,
                      "lms scale high");
    score->add_option("--seed", score_policy.seed, "lms augmentation seed");

    // calibrate
    auto* calibrate =
        app.add_subcommand("calibrate", "calibrate a threshold on val scores");
    std::string cal_scores, cal_out;
    double cal_acc = 0.0;
    calibrate->add_option("--scores", cal_scores, "validation scores CSV")
        ->required();
    calibrate
        ->add_option("--acc", cal_acc,
                     "measured validation accuracy of the scored predictor")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    calibrate->add_option("--out", cal_out, "output threshold JSON")
        ->required();

    // predict
    auto* predict_cmd =
        app.add_subcommand("predict", "predict target accuracy from scores");
    std::string pred_scores, pred_threshold, pred_target, pred_out;
    predict_cmd->add_option("--scores", pred_scores, "target scores CSV")
        ->required();
    predict_cmd->add_option("--threshold", pred_threshold, "threshold JSON")
        ->required();
    predict_cmd->add_option("--target", pred_target, "target tag for the estimate");
    predict_cmd->add_option("--out", pred_out, "output estimate JSON")
        ->required();

    // bench subcommands
    BenchArgs shift_args, fidelity_args, sweep_args, slab_args;
    auto* bench_shift = app.add_subcommand(
        "bench-shift", "distribution-shift + corruption benchmark");
    add_bench_options(bench_shift, shift_args);
    auto* bench_fidelity = app.add_subcommand(
        "bench-fidelity", "training-data fidelity benchmark");
    add_bench_options(bench_fidelity, fidelity_args);
    auto* sweep_ensemble = app.add_subcommand(
        "sweep-ensemble", "MA error vs ensemble size sweep");
    add_bench_options(sweep_ensemble, sweep_args);
    auto* bench_slab = app.add_subcommand(
        "bench-slab", "simplicity-bias stress test on the slab dataset");
    add_bench_options(bench_slab, slab_args);

    // report
    auto* report_cmd = app.add_subcommand(
        "report", "re-emit CSV and plots from a report.json");
    std::string report_path, report_out;
    report_cmd->add_option("--report", report_path, "report.json path")
        ->required();
    report_cmd->add_option("--out", report_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints usage to stderr
        return 1;
    }

    // A validated bench config makes later failures runtime failures (2);
    // anything that goes wrong while loading or validating inputs is a
    // validation failure (1).
    auto run_bench = [](const BenchArgs& args, auto&& runner) -> int {
        ExperimentConfig cfg;
        try {
            cfg = load_bench_config(args);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        try {
            set_jobs(args.jobs);
            finish_bench(runner(cfg), cfg, args);
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    };

    try {
        if (*gen) return run_gen(gen_config, gen_out, gen_seed);
        if (*train) {
            set_jobs(train_jobs);
            return run_train(train_config, train_data, train_out, train_seed);
        }
        if (*score) {
            score_policy.validate();
            return run_score(score_method, score_data, score_model,
                             score_ensemble, score_logits, score_out,
                             score_policy);
        }
        if (*calibrate) return run_calibrate(cal_scores, cal_acc, cal_out);
        if (*predict_cmd)
            return run_predict(pred_scores, pred_threshold, pred_target,
                               pred_out);
        if (*bench_shift)
            return run_bench(shift_args, [](const ExperimentConfig& cfg) {
                return run_shift_benchmark(cfg);
            });
        if (*bench_fidelity)
            return run_bench(fidelity_args, [](const ExperimentConfig& cfg) {
                return run_fidelity_benchmark(cfg);
            });
        if (*sweep_ensemble)
            return run_bench(sweep_args, [](const ExperimentConfig& cfg) {
                return run_ensemble_sweep(cfg, cfg.sweep_sizes);
            });
        if (*bench_slab)
            return run_bench(slab_args, [](const ExperimentConfig& cfg) {
                return run_simplicity_bias(cfg, cfg.slab);
            });
        if (*report_cmd) {
            emit_report(load_report(report_path), report_out);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_validation() ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
