#pragma once

#include <string>
#include <vector>

#include "cascnn/cascade.hpp"
#include "cascnn/layers.hpp"
#include "cascnn/synthetic.hpp"

namespace cascnn {

/// The default 12-layer stack used when no architecture is configured:
/// conv3x3(16)-relu-conv3x3(16)-relu-pool-conv3x3(32)-relu-pool-
/// flatten-dense(128)-relu-dropout-dense(2)-softmax.
std::vector<LayerSpec> reference_arch(float dropout_rate = 0.5f);

/// A slimmer stack for desk-scale experiments:
/// conv3x3(8)-relu-pool-conv3x3(16)-relu-pool-flatten-dense(32)-relu-
/// dropout-dense(2)-softmax.
std::vector<LayerSpec> compact_arch(float dropout_rate = 0.5f);

/// Architecture by name ("reference" or "compact"); throws ConfigError
/// otherwise.
std::vector<LayerSpec> arch_by_name(const std::string& name, float dropout_rate = 0.5f);

/// The documented desk-scale dataset: 50 scans x (2 positives + 800
/// negatives) = 100 nodules vs 40,000 non-nodules, the paper's ~400:1 ratio.
SyntheticConfig desk_synthetic_config(std::uint64_t seed = 1);

/// Cascade configuration tuned to train that dataset in minutes on a CPU:
/// compact architecture, 5 folds, short epochs. Stage and threshold counts
/// keep their standard defaults.
CascadeConfig desk_cascade_config(std::uint64_t seed = 1);

}  // namespace cascnn
