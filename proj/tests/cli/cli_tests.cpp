#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "gepbench/io_csv.hpp"
#include "gepbench/logits.hpp"
#include "gepbench/mlp.hpp"
#include "gepbench/scoring.hpp"

using namespace gepbench;
namespace fs = std::filesystem;

namespace {

fs::path cli_path() {
    const char* env = std::getenv("GEPBENCH_CLI");
    REQUIRE_MESSAGE(env != nullptr, "GEPBENCH_CLI must point at the binary");
    return env;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gepbench_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

CliResult run_cli(const std::string& args) {
    TempDir io;
    const fs::path out = io.path / "out.txt";
    const fs::path err = io.path / "err.txt";
    const std::string cmd = cli_path().string() + " " + args + " 1>" +
                            out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

const char* kTinyBenchConfig = R"({
  "seed": 7,
  "n_seeds": 2,
  "methods": ["conf", "ma"],
  "source": {"samples_per_class": 15},
  "corruptions": {"families": ["additive_noise"], "severities": [1, 3]},
  "train": {"epochs": 10, "hidden_dims": [8]},
  "ensemble": {"m": 2, "eps": 0.02},
  "sweep_sizes": [1, 2],
  "slab": {"n_samples": 120}
})";

} // namespace

TEST_CASE("every subcommand prints nonempty help") {
    for (const char* sub :
         {"gen", "train", "score", "calibrate", "predict", "bench-shift",
          "bench-fidelity", "sweep-ensemble", "bench-slab", "report"}) {
        const CliResult r = run_cli(std::string(sub) + " --help");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("--") != std::string::npos);
        CHECK(r.out.find(sub) != std::string::npos);
    }
    const CliResult top = run_cli("--help");
    CHECK(top.exit_code == 0);
    for (const char* sub : {"bench-shift", "bench-fidelity", "sweep-ensemble",
                            "bench-slab", "report"})
        CHECK(top.out.find(sub) != std::string::npos);
}

TEST_CASE("unknown subcommand and missing config exit 1") {
    const CliResult unknown = run_cli("frobnicate");
    CHECK(unknown.exit_code == 1);
    CHECK(!unknown.err.empty());

    const CliResult missing =
        run_cli("bench-shift --config /nonexistent/c.json --out /tmp/x");
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.find("/nonexistent/c.json") != std::string::npos);
}

TEST_CASE("config schema violations exit 1 before any work") {
    TempDir tmp;
    write_file(tmp.path / "bad.json", R"({"not_a_key": 1})");
    const CliResult r = run_cli("bench-shift --config " +
                                (tmp.path / "bad.json").string() + " --out " +
                                (tmp.path / "out").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("not_a_key") != std::string::npos);
    CHECK(!fs::exists(tmp.path / "out" / "report.json"));
}

TEST_CASE("runtime failures after validation exit 2") {
    TempDir tmp;
    // validates, but undersampling class 7 does not exist at run time
    write_file(tmp.path / "cfg.json", R"({
      "seed": 1, "n_seeds": 1, "methods": ["conf"],
      "source": {"samples_per_class": 10},
      "train": {"epochs": 2},
      "fidelity": {"conditions": ["undersample"],
                    "undersample_classes": [7]}
    })");
    const CliResult r = run_cli("bench-fidelity --config " +
                                (tmp.path / "cfg.json").string() + " --out " +
                                (tmp.path / "out").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("seed 0") != std::string::npos);
}

TEST_CASE("bench-shift twice produces byte-identical outputs") {
    TempDir tmp;
    write_file(tmp.path / "cfg.json", kTinyBenchConfig);
    for (const char* dir : {"a", "b"}) {
        const CliResult r = run_cli("bench-shift --config " +
                                    (tmp.path / "cfg.json").string() +
                                    " --out " + (tmp.path / dir).string());
        REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(tmp.path / "a")) {
        const auto name = entry.path().filename();
        if (name == "timing.txt") continue; // wall clock, not deterministic
        CHECK(slurp(entry.path()) == slurp(tmp.path / "b" / name));
        ++compared;
    }
    CHECK(compared >= 4); // report.json, records.csv, summary.csv, manifest...
    CHECK(fs::exists(tmp.path / "a" / "manifest.json"));
    CHECK(fs::exists(tmp.path / "a" / "timing.txt"));
}

TEST_CASE("--seed override changes bench results") {
    TempDir tmp;
    write_file(tmp.path / "cfg.json", kTinyBenchConfig);
    const CliResult a = run_cli("bench-shift --config " +
                                (tmp.path / "cfg.json").string() + " --out " +
                                (tmp.path / "a").string());
    REQUIRE_MESSAGE(a.exit_code == 0, a.err);
    const CliResult b = run_cli("bench-shift --config " +
                                (tmp.path / "cfg.json").string() +
                                " --seed 12345 --out " +
                                (tmp.path / "b").string());
    REQUIRE_MESSAGE(b.exit_code == 0, b.err);
    CHECK(slurp(tmp.path / "a" / "records.csv") !=
          slurp(tmp.path / "b" / "records.csv"));
}

TEST_CASE("gen -> train -> score -> calibrate -> predict pipeline") {
    TempDir tmp;
    write_file(tmp.path / "gen.json", R"({
      "seed": 3,
      "source": {"n_classes": 3, "n_features": 4, "samples_per_class": 30}
    })");
    CliResult r = run_cli("gen --config " + (tmp.path / "gen.json").string() +
                          " --out " + (tmp.path / "data").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    REQUIRE(fs::exists(tmp.path / "data" / "dataset.csv"));
    REQUIRE(fs::exists(tmp.path / "data" / "features.gepb"));
    REQUIRE(fs::exists(tmp.path / "data" / "labels.gepb"));

    write_file(tmp.path / "train.json", R"({
      "seed": 5,
      "train": {"epochs": 30, "hidden_dims": [8]}
    })");
    r = run_cli("train --config " + (tmp.path / "train.json").string() +
                " --data " + (tmp.path / "data" / "dataset.csv").string() +
                " --out " + (tmp.path / "model").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    REQUIRE(fs::exists(tmp.path / "model" / "model.json"));

    r = run_cli("score --method conf --data " +
                (tmp.path / "data" / "dataset.csv").string() + " --model " +
                (tmp.path / "model").string() + " --out " +
                (tmp.path / "scores.csv").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const auto scores = load_scores_csv(tmp.path / "scores.csv");
    CHECK(scores.size() == 90);
    CHECK(load_scores_gepb(tmp.path / "scores.gepb").size() == 90);
    for (double s : scores) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }

    r = run_cli("calibrate --scores " + (tmp.path / "scores.csv").string() +
                " --acc 0.9 --out " + (tmp.path / "tau.json").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);

    r = run_cli("predict --scores " + (tmp.path / "scores.csv").string() +
                " --threshold " + (tmp.path / "tau.json").string() +
                " --target demo --out " + (tmp.path / "est.json").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const std::string est = slurp(tmp.path / "est.json");
    CHECK(est.find("predicted_accuracy") != std::string::npos);
    CHECK(est.find("demo") != std::string::npos);
}

TEST_CASE("bare relative output filenames work") {
    TempDir tmp;
    std::ofstream(tmp.path / "s.csv") << "sample_index,score\n0,0.4\n1,0.8\n";
    // run with cwd = tmp so --out is a bare filename
    const std::string cmd = "cd " + tmp.path.string() + " && " +
                            cli_path().string() +
                            " calibrate --scores s.csv --acc 0.5 --out "
                            "tau.json > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(tmp.path / "tau.json"));
}

TEST_CASE("score --method ma --logits yields 1/M lattice values") {
    TempDir tmp;
    // build a 10-member bundle from in-process models
    SourceSpec spec;
    spec.n_classes = 2;
    spec.n_features = 2;
    spec.samples_per_class = 25;
    spec.seed = 11;
    const LabeledDataset data = make_source(spec);
    TrainConfig cfg;
    cfg.seed = 12;
    cfg.epochs = 8;
    const Ensemble ens = train_ensemble(data, cfg, {2, 4, 2}, 10, 0.0);
    std::vector<Matrix> logits;
    for (const auto& m : ens.members)
        logits.push_back(forward_batch(m, data.features));
    write_logits_bundle(logits, 2, "demo", &data.labels, tmp.path / "bundle");

    const CliResult r = run_cli(
        "score --method ma --logits " +
        (tmp.path / "bundle" / "manifest.json").string() + " --out " +
        (tmp.path / "ma.csv").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const auto scores = load_scores_csv(tmp.path / "ma.csv");
    CHECK(scores.size() == 50);
    for (double s : scores) {
        CHECK(s >= 0.1 - 1e-12); // at least 1 of 10 votes the modal class
        CHECK(s <= 1.0);
        const double scaled = s * 10.0;
        CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-9));
    }
}

TEST_CASE("lms from logits is rejected with a clear message") {
    TempDir tmp;
    write_file(tmp.path / "manifest.json",
               R"({"n_classes":2,"members":["x.gepb"]})");
    const CliResult r = run_cli(
        "score --method lms --logits " +
        (tmp.path / "manifest.json").string() + " --out " +
        (tmp.path / "s.csv").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("lms") != std::string::npos);
}

TEST_CASE("report re-emits files from a report.json") {
    TempDir tmp;
    write_file(tmp.path / "cfg.json", kTinyBenchConfig);
    CliResult r = run_cli("sweep-ensemble --config " +
                          (tmp.path / "cfg.json").string() + " --out " +
                          (tmp.path / "run").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    REQUIRE(fs::exists(tmp.path / "run" / "mae_vs_ensemble_size.svg"));

    r = run_cli("report --report " +
                (tmp.path / "run" / "report.json").string() + " --out " +
                (tmp.path / "re").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(slurp(tmp.path / "re" / "report.json") ==
          slurp(tmp.path / "run" / "report.json"));
    CHECK(slurp(tmp.path / "re" / "records.csv") ==
          slurp(tmp.path / "run" / "records.csv"));
    CHECK(slurp(tmp.path / "re" / "mae_vs_ensemble_size.svg") ==
          slurp(tmp.path / "run" / "mae_vs_ensemble_size.svg"));
}

TEST_CASE("bench-slab and bench-fidelity run end to end") {
    TempDir tmp;
    write_file(tmp.path / "cfg.json", kTinyBenchConfig);
    for (const char* sub : {"bench-slab", "bench-fidelity"}) {
        const CliResult r = run_cli(std::string(sub) + " --config " +
                                    (tmp.path / "cfg.json").string() +
                                    " --out " +
                                    (tmp.path / sub).string());
        REQUIRE_MESSAGE(r.exit_code == 0, r.err);
        CHECK(fs::exists(tmp.path / sub / "report.json"));
        CHECK(fs::exists(tmp.path / sub / "records.csv"));
        CHECK(fs::exists(tmp.path / sub / "summary.csv"));
    }
}
