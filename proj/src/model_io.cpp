#include "gepbench/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "gepbench/io_binary.hpp"

namespace gepbench {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::missing_file, "cannot open: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::schema, path.string() + ": " + e.what());
    }
}

} // namespace

void save_model(const MlpModel& model, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json meta;
    meta["layer_dims"] = model.layer_dims;
    meta["activation"] = model.activation == Activation::relu ? "relu" : "tanh";
    json weights = json::array(), biases = json::array();
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        const std::string wname = "w" + std::to_string(l) + ".gepb";
        const std::string bname = "b" + std::to_string(l) + ".gepb";
        write_matrix(model.weights[l], dir / wname);
        Matrix b(1, model.biases[l].size());
        for (std::size_t j = 0; j < model.biases[l].size(); ++j)
            b(0, j) = model.biases[l][j];
        write_matrix(b, dir / bname);
        weights.push_back(wname);
        biases.push_back(bname);
    }
    meta["weights"] = weights;
    meta["biases"] = biases;
    std::ofstream out(dir / "model.json", std::ios::trunc);
    if (!out)
        fail(ErrorKind::io, "cannot write " + (dir / "model.json").string());
    out << meta.dump(2) << "\n";
}

MlpModel load_model(const std::filesystem::path& dir) {
    const json meta = load_json(dir / "model.json");
    if (!meta.contains("layer_dims") || !meta.contains("weights") ||
        !meta.contains("biases") || !meta.contains("activation"))
        fail(ErrorKind::schema, "model.json: missing required keys");

    MlpModel model;
    model.layer_dims = meta["layer_dims"].get<std::vector<std::size_t>>();
    const auto act = meta["activation"].get<std::string>();
    if (act == "relu")
        model.activation = Activation::relu;
    else if (act == "tanh")
        model.activation = Activation::tanh;
    else
        fail(ErrorKind::schema, "model.json: unknown activation '" + act + "'");

    if (model.layer_dims.size() < 2)
        fail(ErrorKind::schema, "model.json: layer_dims too short");
    const std::size_t n_layers = model.layer_dims.size() - 1;
    if (meta["weights"].size() != n_layers || meta["biases"].size() != n_layers)
        fail(ErrorKind::schema,
             "model.json: expected " + std::to_string(n_layers) +
                 " weight/bias files");

    for (std::size_t l = 0; l < n_layers; ++l) {
        Matrix w = read_matrix(dir / meta["weights"][l].get<std::string>());
        if (w.rows() != model.layer_dims[l] ||
            w.cols() != model.layer_dims[l + 1])
            fail(ErrorKind::shape_mismatch,
                 "layer " + std::to_string(l) + " weights are " +
                     std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                     ", expected " + std::to_string(model.layer_dims[l]) + "x" +
                     std::to_string(model.layer_dims[l + 1]));
        Matrix b = read_matrix(dir / meta["biases"][l].get<std::string>());
        if (b.rows() != 1 || b.cols() != model.layer_dims[l + 1])
            fail(ErrorKind::shape_mismatch,
                 "layer " + std::to_string(l) + " bias shape mismatch");
        model.weights.push_back(std::move(w));
        model.biases.push_back(b.row_copy(0));
    }
    return model;
}

void save_ensemble(const Ensemble& ensemble,
                   const std::filesystem::path& dir) {
    if (ensemble.members.empty())
        fail(ErrorKind::empty_input, "save_ensemble: no members");
    std::filesystem::create_directories(dir);
    json meta;
    meta["diversity_noise"] = ensemble.diversity_noise;
    json members = json::array();
    for (std::size_t m = 0; m < ensemble.members.size(); ++m) {
        const std::string name = "member" + std::to_string(m);
        save_model(ensemble.members[m], dir / name);
        members.push_back(name);
    }
    meta["members"] = members;
    std::ofstream out(dir / "ensemble.json", std::ios::trunc);
    if (!out)
        fail(ErrorKind::io, "cannot write " + (dir / "ensemble.json").string());
    out << meta.dump(2) << "\n";
}

Ensemble load_ensemble(const std::filesystem::path& dir) {
    const json meta = load_json(dir / "ensemble.json");
    if (!meta.contains("members") || !meta["members"].is_array() ||
        meta["members"].empty())
        fail(ErrorKind::schema, "ensemble.json: members must be nonempty");
    Ensemble ensemble;
    ensemble.diversity_noise = meta.value("diversity_noise", 0.0);
    for (const auto& name : meta["members"])
        ensemble.members.push_back(load_model(dir / name.get<std::string>()));
    for (std::size_t m = 1; m < ensemble.members.size(); ++m)
        if (ensemble.members[m].layer_dims != ensemble.members[0].layer_dims)
            fail(ErrorKind::shape_mismatch,
                 "ensemble member " + std::to_string(m) +
                     " layer dims differ from member 0");
    return ensemble;
}

} // namespace gepbench
