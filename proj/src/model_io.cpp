#include "cascnn/model_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cascnn/errors.hpp"
#include "cascnn/network_io.hpp"
#include "cascnn/serialize_json.hpp"

namespace cascnn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

std::string fold_dir(const std::string& dir, int f) {
    return dir + "/fold_" + std::to_string(f);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return j;
}

}  // namespace

void save_model(const CascadeModel& model, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory: " + dir);

    json manifest;
    manifest["format_version"] = kManifestVersion;
    manifest["k"] = model.k;
    manifest["n_stages"] = model.n_stages();
    manifest["config"] = model.config;
    manifest["stage_table"] = model.stage_table;
    manifest["warnings"] = model.warnings;

    json folds = json::array();
    for (int f = 0; f < model.k; ++f) {
        const FoldPipeline& pipe = model.folds[static_cast<std::size_t>(f)];
        fs::create_directories(fold_dir(dir, f), ec);
        if (ec) throw IoError("cannot create directory: " + fold_dir(dir, f));

        json fold_entry;
        json stages = json::array();
        for (std::size_t s = 0; s < pipe.stages.size(); ++s) {
            const auto& stage = pipe.stages[s];
            save_network(stage.net,
                         fold_dir(dir, f) + "/stage_" + std::to_string(s) + ".csnn");
            stages.push_back(json{{"threshold", stage.threshold},
                                  {"threshold_factor", stage.threshold_factor},
                                  {"stats", stage.stats}});
        }
        fold_entry["stages"] = stages;
        save_network(pipe.final_net, fold_dir(dir, f) + "/final.csnn");
        folds.push_back(fold_entry);
    }
    manifest["folds"] = folds;

    json assignment = json::object();
    for (const auto& [lesion, fold] : model.fold_assignment.fold_of) assignment[lesion] = fold;
    manifest["fold_assignment"] = assignment;

    write_text(dir + "/manifest.json", manifest.dump(2) + "\n");
}

CascadeModel load_model(const std::string& dir) {
    const json manifest = read_json(dir + "/manifest.json");
    if (manifest.value("format_version", -1) != kManifestVersion)
        throw FormatError(dir + "/manifest.json: unsupported format_version");

    CascadeModel model;
    model.k = manifest.at("k").get<int>();
    model.config = manifest.at("config").get<CascadeConfig>();
    model.stage_table = manifest.at("stage_table").get<std::vector<StageStats>>();
    model.warnings = manifest.value("warnings", std::vector<std::string>{});
    model.instrumented = false;

    model.fold_assignment.k = model.k;
    for (const auto& [lesion, fold] : manifest.at("fold_assignment").items())
        model.fold_assignment.fold_of[lesion] = fold.get<int>();

    const int n_stages = manifest.at("n_stages").get<int>();
    const json& folds = manifest.at("folds");
    if (static_cast<int>(folds.size()) != model.k)
        throw FormatError(dir + "/manifest.json: fold count mismatch");

    for (int f = 0; f < model.k; ++f) {
        const json& fold_entry = folds[static_cast<std::size_t>(f)];
        const json& stages = fold_entry.at("stages");
        if (static_cast<int>(stages.size()) != n_stages)
            throw FormatError(dir + "/manifest.json: fold " + std::to_string(f) +
                              " has an inconsistent stage count");
        std::vector<SelectiveStage> loaded;
        loaded.reserve(stages.size());
        for (std::size_t s = 0; s < stages.size(); ++s) {
            Network net =
                load_network(fold_dir(dir, f) + "/stage_" + std::to_string(s) + ".csnn");
            loaded.push_back(SelectiveStage{
                std::move(net), stages[s].at("threshold").get<double>(),
                stages[s].at("threshold_factor").get<double>(),
                stages[s].at("stats").get<StageStats>(), {}});
        }
        Network final_net = load_network(fold_dir(dir, f) + "/final.csnn");
        model.folds.push_back(FoldPipeline{std::move(loaded), std::move(final_net), {}});
    }
    return model;
}

}  // namespace cascnn
