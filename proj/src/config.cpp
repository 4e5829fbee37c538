#include "gepbench/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "gepbench/io_binary.hpp"

namespace gepbench {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!known.contains(key))
            fail(ErrorKind::schema,
                 "config: unknown key '" + key + "' in " + where);
}

BenchMethod parse_method(const std::string& s) {
    if (s == "conf") return BenchMethod::conf;
    if (s == "lms") return BenchMethod::lms;
    if (s == "ma") return BenchMethod::ma;
    if (s == "ma_eps") return BenchMethod::ma_eps;
    fail(ErrorKind::schema, "config: unknown method '" + s + "'");
}

FidelityCondition parse_condition(const std::string& s) {
    if (s == "clean") return FidelityCondition::clean;
    if (s == "label_noise") return FidelityCondition::label_noise;
    if (s == "measurement_noise") return FidelityCondition::measurement_noise;
    if (s == "undersample") return FidelityCondition::undersample;
    fail(ErrorKind::schema, "config: unknown fidelity condition '" + s + "'");
}

CorruptionFamily parse_family(const std::string& s) {
    if (s == "additive_noise") return CorruptionFamily::additive_noise;
    if (s == "feature_blur") return CorruptionFamily::feature_blur;
    if (s == "feature_dropout") return CorruptionFamily::feature_dropout;
    if (s == "affine_warp") return CorruptionFamily::affine_warp;
    fail(ErrorKind::schema, "config: unknown corruption family '" + s + "'");
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj[key].get<T>();
    } catch (const json::exception& e) {
        fail(ErrorKind::schema,
             std::string("config: bad value for '") + key + "': " + e.what());
    }
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorKind::schema, std::string("config: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::schema, "config: not a JSON object");

    reject_unknown_keys(
        j,
        {"seed", "n_seeds", "methods", "source", "shifts", "corruptions",
         "fidelity", "train", "split", "ensemble", "augmentation",
         "sweep_sizes", "slab"},
        "top level");

    ExperimentConfig cfg;
    read_into(j, "seed", cfg.seed);
    read_into(j, "n_seeds", cfg.n_seeds);

    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : j["methods"])
            cfg.methods.push_back(parse_method(m.get<std::string>()));
    }

    if (j.contains("source")) {
        const json& s = j["source"];
        reject_unknown_keys(s,
                            {"n_classes", "n_features", "samples_per_class",
                             "cluster_separation", "within_class_spread"},
                            "source");
        read_into(s, "n_classes", cfg.source.n_classes);
        read_into(s, "n_features", cfg.source.n_features);
        read_into(s, "samples_per_class", cfg.source.samples_per_class);
        read_into(s, "cluster_separation", cfg.source.cluster_separation);
        read_into(s, "within_class_spread", cfg.source.within_class_spread);
    }

    if (j.contains("shifts")) {
        const json& s = j["shifts"];
        reject_unknown_keys(s, {"near", "far"}, "shifts");
        read_into(s, "near", cfg.near_magnitude);
        read_into(s, "far", cfg.far_magnitude);
    }

    if (j.contains("corruptions")) {
        const json& c = j["corruptions"];
        reject_unknown_keys(c, {"families", "severities"}, "corruptions");
        if (c.contains("families")) {
            cfg.corruption_families.clear();
            for (const auto& f : c["families"])
                cfg.corruption_families.push_back(
                    parse_family(f.get<std::string>()));
        }
        read_into(c, "severities", cfg.severities);
    }

    if (j.contains("fidelity")) {
        const json& f = j["fidelity"];
        reject_unknown_keys(f,
                            {"conditions", "label_noise_rate", "blur_sigma",
                             "additive_sigma", "undersample_classes",
                             "undersample_fraction"},
                            "fidelity");
        if (f.contains("conditions")) {
            cfg.fidelity.clear();
            for (const auto& c : f["conditions"])
                cfg.fidelity.push_back(parse_condition(c.get<std::string>()));
        }
        read_into(f, "label_noise_rate", cfg.label_noise_rate);
        read_into(f, "blur_sigma", cfg.blur_sigma);
        read_into(f, "additive_sigma", cfg.additive_sigma);
        if (f.contains("undersample_classes")) {
            cfg.undersample_classes.clear();
            for (const auto& c : f["undersample_classes"])
                cfg.undersample_classes.insert(c.get<int>());
        }
        read_into(f, "undersample_fraction", cfg.undersample_fraction);
    }

    if (j.contains("train")) {
        const json& t = j["train"];
        reject_unknown_keys(t,
                            {"epochs", "learning_rate", "batch_size",
                             "weight_decay", "hidden_dims", "activation"},
                            "train");
        read_into(t, "epochs", cfg.train.epochs);
        read_into(t, "learning_rate", cfg.train.learning_rate);
        read_into(t, "batch_size", cfg.train.batch_size);
        read_into(t, "weight_decay", cfg.train.weight_decay);
        read_into(t, "hidden_dims", cfg.hidden_dims);
        if (t.contains("activation")) {
            const auto a = t["activation"].get<std::string>();
            if (a == "relu")
                cfg.activation = Activation::relu;
            else if (a == "tanh")
                cfg.activation = Activation::tanh;
            else
                fail(ErrorKind::schema,
                     "config: unknown activation '" + a + "'");
        }
    }

    if (j.contains("split")) {
        const json& s = j["split"];
        reject_unknown_keys(s, {"train_fraction", "val_fraction"}, "split");
        read_into(s, "train_fraction", cfg.train_fraction);
        read_into(s, "val_fraction", cfg.val_fraction);
    }

    if (j.contains("ensemble")) {
        const json& e = j["ensemble"];
        reject_unknown_keys(e, {"m", "eps"}, "ensemble");
        read_into(e, "m", cfg.ensemble_m);
        read_into(e, "eps", cfg.ensemble_eps);
    }

    if (j.contains("augmentation")) {
        const json& a = j["augmentation"];
        reject_unknown_keys(
            a, {"k", "jitter_sigma", "scale_low", "scale_high"},
            "augmentation");
        read_into(a, "k", cfg.augmentation.count);
        read_into(a, "jitter_sigma", cfg.augmentation.jitter_sigma);
        read_into(a, "scale_low", cfg.augmentation.scale_low);
        read_into(a, "scale_high", cfg.augmentation.scale_high);
    }

    read_into(j, "sweep_sizes", cfg.sweep_sizes);

    if (j.contains("slab")) {
        const json& s = j["slab"];
        reject_unknown_keys(s,
                            {"n_samples", "simple_feature_margin", "n_slabs",
                             "slab_noise"},
                            "slab");
        read_into(s, "n_samples", cfg.slab.n_samples);
        read_into(s, "simple_feature_margin", cfg.slab.simple_feature_margin);
        read_into(s, "n_slabs", cfg.slab.n_slabs);
        read_into(s, "slab_noise", cfg.slab.slab_noise);
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::missing_file, "config file not found: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_experiment_config(text);
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["n_seeds"] = cfg.n_seeds;
    json methods = json::array();
    for (BenchMethod m : cfg.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["source"] = {{"n_classes", cfg.source.n_classes},
                   {"n_features", cfg.source.n_features},
                   {"samples_per_class", cfg.source.samples_per_class},
                   {"cluster_separation", cfg.source.cluster_separation},
                   {"within_class_spread", cfg.source.within_class_spread}};
    j["shifts"] = {{"near", cfg.near_magnitude}, {"far", cfg.far_magnitude}};
    json families = json::array();
    for (CorruptionFamily f : cfg.corruption_families)
        families.push_back(to_string(f));
    j["corruptions"] = {{"families", families}, {"severities", cfg.severities}};
    json conditions = json::array();
    for (FidelityCondition c : cfg.fidelity) conditions.push_back(to_string(c));
    j["fidelity"] = {{"conditions", conditions},
                     {"label_noise_rate", cfg.label_noise_rate},
                     {"blur_sigma", cfg.blur_sigma},
                     {"additive_sigma", cfg.additive_sigma},
                     {"undersample_classes", cfg.undersample_classes},
                     {"undersample_fraction", cfg.undersample_fraction}};
    j["train"] = {{"epochs", cfg.train.epochs},
                  {"learning_rate", cfg.train.learning_rate},
                  {"batch_size", cfg.train.batch_size},
                  {"weight_decay", cfg.train.weight_decay},
                  {"hidden_dims", cfg.hidden_dims},
                  {"activation",
                   cfg.activation == Activation::relu ? "relu" : "tanh"}};
    j["split"] = {{"train_fraction", cfg.train_fraction},
                  {"val_fraction", cfg.val_fraction}};
    j["ensemble"] = {{"m", cfg.ensemble_m}, {"eps", cfg.ensemble_eps}};
    j["augmentation"] = {{"k", cfg.augmentation.count},
                         {"jitter_sigma", cfg.augmentation.jitter_sigma},
                         {"scale_low", cfg.augmentation.scale_low},
                         {"scale_high", cfg.augmentation.scale_high}};
    j["sweep_sizes"] = cfg.sweep_sizes;
    j["slab"] = {{"n_samples", cfg.slab.n_samples},
                 {"simple_feature_margin", cfg.slab.simple_feature_margin},
                 {"n_slabs", cfg.slab.n_slabs},
                 {"slab_noise", cfg.slab.slab_noise}};
    return j.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = config_to_json_text(cfg);
    const std::uint32_t crc =
        crc32({reinterpret_cast<const std::uint8_t*>(text.data()),
               text.size()});
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", crc);
    return buf;
}

} // namespace gepbench
