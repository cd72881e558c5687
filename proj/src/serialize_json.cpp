#include "cascnn/serialize_json.hpp"

#include "cascnn/errors.hpp"

namespace cascnn {

namespace {

LayerKind layer_kind_from_name(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(LayerKind::softmax); ++k)
        if (name == layer_kind_name(static_cast<LayerKind>(k)))
            return static_cast<LayerKind>(k);
    throw ConfigError("unknown layer kind: " + name);
}

}  // namespace

void to_json(nlohmann::json& j, const LayerSpec& spec) {
    j = nlohmann::json{{"kind", layer_kind_name(spec.kind)}};
    switch (spec.kind) {
        case LayerKind::conv2d:
            j["out_channels"] = spec.out_channels;
            j["kernel_size"] = spec.kernel_size;
            j["padding"] = padding_name(spec.padding);
            break;
        case LayerKind::dense:
            j["out_features"] = spec.out_features;
            break;
        case LayerKind::dropout:
            j["rate"] = spec.rate;
            break;
        default:
            break;
    }
}

void from_json(const nlohmann::json& j, LayerSpec& spec) {
    const LayerKind kind = layer_kind_from_name(j.at("kind").get<std::string>());
    switch (kind) {
        case LayerKind::conv2d: {
            Padding pad = Padding::same;
            if (j.contains("padding")) {
                const std::string p = j["padding"].get<std::string>();
                if (p == "same")
                    pad = Padding::same;
                else if (p == "valid")
                    pad = Padding::valid;
                else
                    throw ConfigError("unknown padding mode: " + p);
            }
            spec = LayerSpec::conv(j.at("out_channels").get<int>(),
                                   j.at("kernel_size").get<int>(), pad);
            break;
        }
        case LayerKind::dense:
            spec = LayerSpec::dense(j.at("out_features").get<int>());
            break;
        case LayerKind::dropout:
            spec = LayerSpec::dropout(j.at("rate").get<float>());
            break;
        case LayerKind::maxpool2x2:
            spec = LayerSpec::maxpool();
            break;
        case LayerKind::relu:
            spec = LayerSpec::relu();
            break;
        case LayerKind::flatten:
            spec = LayerSpec::flatten();
            break;
        case LayerKind::softmax:
            spec = LayerSpec::softmax();
            break;
    }
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
    j = nlohmann::json{{"learning_rate", cfg.learning_rate},
                       {"epochs", cfg.epochs},
                       {"batch_size", cfg.batch_size},
                       {"dropout_rate", cfg.dropout_rate},
                       {"seed", cfg.seed},
                       {"shuffle", cfg.shuffle}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
    cfg = TrainConfig{};
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<float>();
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
    if (j.contains("dropout_rate")) cfg.dropout_rate = j["dropout_rate"].get<float>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("shuffle")) cfg.shuffle = j["shuffle"].get<bool>();
}

void to_json(nlohmann::json& j, const AugmentParams& params) {
    j = nlohmann::json{{"angle_min_deg", params.angle_min_deg},
                       {"angle_max_deg", params.angle_max_deg},
                       {"scale_min", params.scale_min},
                       {"scale_max", params.scale_max}};
}

void from_json(const nlohmann::json& j, AugmentParams& params) {
    params = AugmentParams{};
    if (j.contains("angle_min_deg")) params.angle_min_deg = j["angle_min_deg"].get<double>();
    if (j.contains("angle_max_deg")) params.angle_max_deg = j["angle_max_deg"].get<double>();
    if (j.contains("scale_min")) params.scale_min = j["scale_min"].get<double>();
    if (j.contains("scale_max")) params.scale_max = j["scale_max"].get<double>();
}

void to_json(nlohmann::json& j, const CascadeConfig& cfg) {
    j = nlohmann::json{{"n_stages", cfg.n_stages},
                       {"threshold_factor", cfg.threshold_factor},
                       {"per_fold_negatives", cfg.per_fold_negatives},
                       {"stage_oversample", cfg.stage_oversample},
                       {"final_oversample", cfg.final_oversample},
                       {"k", cfg.k},
                       {"sigma_population", sigma_population_name(cfg.sigma_population)},
                       {"split_granularity",
                        cfg.split_granularity == SplitGranularity::lesion ? "lesion" : "scan"},
                       {"augment", cfg.augment},
                       {"arch", cfg.arch},
                       {"stage_train", cfg.stage_train},
                       {"final_train", cfg.final_train},
                       {"seed", cfg.seed},
                       {"jobs", cfg.jobs}};
}

void from_json(const nlohmann::json& j, CascadeConfig& cfg) {
    cfg = CascadeConfig{};
    if (j.contains("n_stages")) cfg.n_stages = j["n_stages"].get<int>();
    if (j.contains("threshold_factor"))
        cfg.threshold_factor = j["threshold_factor"].get<double>();
    if (j.contains("per_fold_negatives"))
        cfg.per_fold_negatives = j["per_fold_negatives"].get<int>();
    if (j.contains("stage_oversample")) cfg.stage_oversample = j["stage_oversample"].get<int>();
    if (j.contains("final_oversample")) cfg.final_oversample = j["final_oversample"].get<int>();
    if (j.contains("k")) cfg.k = j["k"].get<int>();
    if (j.contains("sigma_population"))
        cfg.sigma_population =
            sigma_population_from_name(j["sigma_population"].get<std::string>());
    if (j.contains("split_granularity")) {
        const std::string g = j["split_granularity"].get<std::string>();
        if (g == "lesion")
            cfg.split_granularity = SplitGranularity::lesion;
        else if (g == "scan")
            cfg.split_granularity = SplitGranularity::scan;
        else
            throw ConfigError("unknown split granularity: " + g);
    }
    if (j.contains("augment")) cfg.augment = j["augment"].get<AugmentParams>();
    if (j.contains("arch")) cfg.arch = j["arch"].get<std::vector<LayerSpec>>();
    if (j.contains("stage_train")) cfg.stage_train = j["stage_train"].get<TrainConfig>();
    if (j.contains("final_train")) cfg.final_train = j["final_train"].get<TrainConfig>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
}

void to_json(nlohmann::json& j, const SyntheticConfig& cfg) {
    j = nlohmann::json{{"n_scans", cfg.n_scans},
                       {"positives_per_scan", cfg.positives_per_scan},
                       {"negatives_per_scan", cfg.negatives_per_scan},
                       {"hard_negative_fraction", cfg.hard_negative_fraction},
                       {"noise_level", cfg.noise_level},
                       {"seed", cfg.seed},
                       {"channels", cfg.channels},
                       {"height", cfg.height},
                       {"width", cfg.width}};
}

void from_json(const nlohmann::json& j, SyntheticConfig& cfg) {
    cfg = SyntheticConfig{};
    if (j.contains("n_scans")) cfg.n_scans = j["n_scans"].get<int>();
    if (j.contains("positives_per_scan"))
        cfg.positives_per_scan = j["positives_per_scan"].get<int>();
    if (j.contains("negatives_per_scan"))
        cfg.negatives_per_scan = j["negatives_per_scan"].get<int>();
    if (j.contains("hard_negative_fraction"))
        cfg.hard_negative_fraction = j["hard_negative_fraction"].get<double>();
    if (j.contains("noise_level")) cfg.noise_level = j["noise_level"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("channels")) cfg.channels = j["channels"].get<int>();
    if (j.contains("height")) cfg.height = j["height"].get<int>();
    if (j.contains("width")) cfg.width = j["width"].get<int>();
}

void to_json(nlohmann::json& j, const StageStats& stats) {
    j = nlohmann::json{{"n_nodule_before", stats.n_nodule_before},
                       {"n_nodule_after", stats.n_nodule_after},
                       {"n_non_nodule_before", stats.n_non_nodule_before},
                       {"n_non_nodule_after", stats.n_non_nodule_after},
                       {"sigma", stats.sigma},
                       {"threshold", stats.threshold}};
}

void from_json(const nlohmann::json& j, StageStats& stats) {
    stats.n_nodule_before = j.at("n_nodule_before").get<std::size_t>();
    stats.n_nodule_after = j.at("n_nodule_after").get<std::size_t>();
    stats.n_non_nodule_before = j.at("n_non_nodule_before").get<std::size_t>();
    stats.n_non_nodule_after = j.at("n_non_nodule_after").get<std::size_t>();
    stats.sigma = j.at("sigma").get<double>();
    stats.threshold = j.at("threshold").get<double>();
}

void to_json(nlohmann::json& j, const ScoreRecord& record) {
    j = nlohmann::json{{"lesion_id", record.lesion_id},
                       {"scan_id", record.scan_id},
                       {"label", record.label},
                       {"score", record.score}};
    if (record.rejected()) j["rejected_at"] = record.rejected_at;
}

void from_json(const nlohmann::json& j, ScoreRecord& record) {
    record.lesion_id = j.at("lesion_id").get<std::string>();
    record.scan_id = j.at("scan_id").get<std::string>();
    record.label = j.at("label").get<int>();
    record.score = j.at("score").get<double>();
    record.rejected_at = j.contains("rejected_at") ? j["rejected_at"].get<int>() : -1;
}

void to_json(nlohmann::json& j, const FrocPoint& point) {
    j = nlohmann::json{{"threshold", point.threshold},
                       {"tp", point.tp},
                       {"fp", point.fp},
                       {"sensitivity", point.sensitivity},
                       {"fp_per_scan", point.fp_per_scan}};
}

void from_json(const nlohmann::json& j, FrocPoint& point) {
    point.threshold = j.at("threshold").get<double>();
    point.tp = j.at("tp").get<std::size_t>();
    point.fp = j.at("fp").get<std::size_t>();
    point.sensitivity = j.at("sensitivity").get<double>();
    point.fp_per_scan = j.at("fp_per_scan").get<double>();
}

void to_json(nlohmann::json& j, const FrocCurve& curve) {
    j = nlohmann::json{{"points", curve.points},
                       {"n_scans", curve.n_scans},
                       {"n_positives", curve.n_positives}};
}

void from_json(const nlohmann::json& j, FrocCurve& curve) {
    curve.points = j.at("points").get<std::vector<FrocPoint>>();
    curve.n_scans = j.at("n_scans").get<std::size_t>();
    curve.n_positives = j.at("n_positives").get<std::size_t>();
}

}  // namespace cascnn
