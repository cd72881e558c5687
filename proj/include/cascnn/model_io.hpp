#pragma once

#include <string>

#include "cascnn/cascade.hpp"

namespace cascnn {

/// Writes the model directory: fold_<i>/stage_<j>.csnn, fold_<i>/final.csnn,
/// and manifest.json (config snapshot, per-fold thresholds and stats, the
/// aggregated stage table, fold assignment, warnings). The manifest is the
/// source of truth for thresholds.
void save_model(const CascadeModel& model, const std::string& dir);

/// Reloads a directory written by save_model. The returned model is not
/// instrumented (training-set ids are not serialized).
CascadeModel load_model(const std::string& dir);

}  // namespace cascnn
