#include "gepbench/logits.hpp"

#include <fstream>

#include <json.hpp>

#include "gepbench/io_binary.hpp"

namespace gepbench {

using nlohmann::json;

LogitsBundle ingest_logits(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        fail(ErrorKind::missing_file,
             "cannot open manifest: " + manifest_path.string());
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::schema,
             "manifest " + manifest_path.string() + ": " + e.what());
    }
    if (!manifest.contains("n_classes") || !manifest["n_classes"].is_number_integer())
        fail(ErrorKind::schema, "manifest: missing integer n_classes");
    if (!manifest.contains("members") || !manifest["members"].is_array() ||
        manifest["members"].empty())
        fail(ErrorKind::schema, "manifest: members must be a nonempty array");

    LogitsBundle bundle;
    bundle.n_classes = manifest["n_classes"].get<int>();
    if (bundle.n_classes < 2)
        fail(ErrorKind::schema, "manifest: n_classes must be >= 2");
    bundle.dataset_tag = manifest.value("dataset", "");

    const auto dir = manifest_path.parent_path();
    for (std::size_t m = 0; m < manifest["members"].size(); ++m) {
        if (!manifest["members"][m].is_string())
            fail(ErrorKind::schema,
                 "manifest: member " + std::to_string(m) + " is not a path");
        const auto path = dir / manifest["members"][m].get<std::string>();
        Matrix logits = read_matrix(path);
        if (logits.cols() != static_cast<std::size_t>(bundle.n_classes))
            fail(ErrorKind::shape_mismatch,
                 "member " + std::to_string(m) + " (" + path.string() +
                     "): " + std::to_string(logits.cols()) +
                     " cols != n_classes " + std::to_string(bundle.n_classes));
        if (m > 0 && logits.rows() != bundle.member_logits[0].rows())
            fail(ErrorKind::shape_mismatch,
                 "member " + std::to_string(m) + " (" + path.string() +
                     "): " + std::to_string(logits.rows()) + "x" +
                     std::to_string(logits.cols()) + " does not match member 0 (" +
                     std::to_string(bundle.member_logits[0].rows()) + "x" +
                     std::to_string(bundle.member_logits[0].cols()) + ")");
        bundle.member_logits.push_back(std::move(logits));
    }

    if (manifest.contains("labels")) {
        const auto path = dir / manifest["labels"].get<std::string>();
        Matrix lab = read_matrix(path);
        if (lab.cols() != 1 || lab.rows() != bundle.n_samples())
            fail(ErrorKind::shape_mismatch,
                 "labels (" + path.string() + "): expected " +
                     std::to_string(bundle.n_samples()) + "x1, got " +
                     std::to_string(lab.rows()) + "x" +
                     std::to_string(lab.cols()));
        std::vector<int> labels(lab.rows());
        for (std::size_t i = 0; i < lab.rows(); ++i)
            labels[i] = static_cast<int>(lab(i, 0));
        bundle.labels = std::move(labels);
    }
    return bundle;
}

void write_logits_bundle(const std::vector<Matrix>& member_logits,
                         int n_classes, const std::string& dataset_tag,
                         const std::vector<int>* labels,
                         const std::filesystem::path& dir,
                         const std::string& manifest_name) {
    if (member_logits.empty())
        fail(ErrorKind::empty_input, "write_logits_bundle: no members");
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["n_classes"] = n_classes;
    manifest["dataset"] = dataset_tag;
    json members = json::array();
    for (std::size_t m = 0; m < member_logits.size(); ++m) {
        const std::string name = "member" + std::to_string(m) + ".gepb";
        write_matrix(member_logits[m], dir / name);
        members.push_back(name);
    }
    manifest["members"] = members;
    if (labels) {
        Matrix lab(labels->size(), 1);
        for (std::size_t i = 0; i < labels->size(); ++i)
            lab(i, 0) = static_cast<double>((*labels)[i]);
        write_matrix(lab, dir / "labels.gepb");
        manifest["labels"] = "labels.gepb";
    }
    std::ofstream out(dir / manifest_name, std::ios::trunc);
    if (!out)
        fail(ErrorKind::io,
             "cannot write manifest: " + (dir / manifest_name).string());
    out << manifest.dump(2) << "\n";
}

} // namespace gepbench
