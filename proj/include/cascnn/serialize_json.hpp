#pragma once

#include <json.hpp>

#include "cascnn/cascade.hpp"
#include "cascnn/eval.hpp"
#include "cascnn/synthetic.hpp"

// nlohmann ADL hooks for the library types that travel through manifests,
// reports and config files. Keys are emitted in nlohmann's sorted order, so
// serialized artifacts are byte-reproducible.

namespace cascnn {

void to_json(nlohmann::json& j, const LayerSpec& spec);
void from_json(const nlohmann::json& j, LayerSpec& spec);

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

void to_json(nlohmann::json& j, const AugmentParams& params);
void from_json(const nlohmann::json& j, AugmentParams& params);

void to_json(nlohmann::json& j, const CascadeConfig& cfg);
void from_json(const nlohmann::json& j, CascadeConfig& cfg);

void to_json(nlohmann::json& j, const SyntheticConfig& cfg);
void from_json(const nlohmann::json& j, SyntheticConfig& cfg);

void to_json(nlohmann::json& j, const StageStats& stats);
void from_json(const nlohmann::json& j, StageStats& stats);

void to_json(nlohmann::json& j, const ScoreRecord& record);
void from_json(const nlohmann::json& j, ScoreRecord& record);

void to_json(nlohmann::json& j, const FrocPoint& point);
void from_json(const nlohmann::json& j, FrocPoint& point);

void to_json(nlohmann::json& j, const FrocCurve& curve);
void from_json(const nlohmann::json& j, FrocCurve& curve);

}  // namespace cascnn
