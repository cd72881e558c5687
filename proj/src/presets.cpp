#include "cascnn/presets.hpp"

#include "cascnn/errors.hpp"

namespace cascnn {

std::vector<LayerSpec> reference_arch(float dropout_rate) {
    return {
        LayerSpec::conv(16, 3), LayerSpec::relu(),
        LayerSpec::conv(16, 3), LayerSpec::relu(),
        LayerSpec::maxpool(),
        LayerSpec::conv(32, 3), LayerSpec::relu(),
        LayerSpec::maxpool(),
        LayerSpec::flatten(),
        LayerSpec::dense(128), LayerSpec::relu(),
        LayerSpec::dropout(dropout_rate),
        LayerSpec::dense(2), LayerSpec::softmax(),
    };
}

std::vector<LayerSpec> compact_arch(float dropout_rate) {
    return {
        LayerSpec::conv(8, 3), LayerSpec::relu(),
        LayerSpec::maxpool(),
        LayerSpec::conv(16, 3), LayerSpec::relu(),
        LayerSpec::maxpool(),
        LayerSpec::flatten(),
        LayerSpec::dense(32), LayerSpec::relu(),
        LayerSpec::dropout(dropout_rate),
        LayerSpec::dense(2), LayerSpec::softmax(),
    };
}

std::vector<LayerSpec> arch_by_name(const std::string& name, float dropout_rate) {
    if (name == "reference") return reference_arch(dropout_rate);
    if (name == "compact") return compact_arch(dropout_rate);
    throw ConfigError("unknown architecture name: " + name);
}

SyntheticConfig desk_synthetic_config(std::uint64_t seed) {
    SyntheticConfig cfg;
    cfg.n_scans = 50;
    cfg.positives_per_scan = 2;
    cfg.negatives_per_scan = 800;
    cfg.hard_negative_fraction = 0.15;
    cfg.noise_level = 0.06;
    cfg.seed = seed;
    return cfg;
}

CascadeConfig desk_cascade_config(std::uint64_t seed) {
    CascadeConfig cfg;
    cfg.k = 5;
    cfg.per_fold_negatives = 150;
    cfg.arch = compact_arch(0.25f);
    cfg.stage_train.learning_rate = 0.02f;
    cfg.stage_train.epochs = 3;
    cfg.stage_train.batch_size = 32;
    cfg.stage_train.dropout_rate = 0.25f;
    cfg.final_train.learning_rate = 0.02f;
    cfg.final_train.epochs = 5;
    cfg.final_train.batch_size = 32;
    cfg.final_train.dropout_rate = 0.25f;
    cfg.seed = seed;
    return cfg;
}

}  // namespace cascnn
