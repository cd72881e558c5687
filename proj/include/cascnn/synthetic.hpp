#pragma once

#include <cstdint>

#include "cascnn/patch.hpp"

namespace cascnn {

/// Parameters for the built-in imbalanced dataset. Positives are bright
/// Gaussian blobs over noise; negatives are noise, a fraction of which carry
/// bright line/arc structures (vessel/rib analogues) to make them hard.
struct SyntheticConfig {
    int n_scans = 50;
    int positives_per_scan = 2;
    int negatives_per_scan = 800;
    double hard_negative_fraction = 0.15;
    double noise_level = 0.06;
    std::uint64_t seed = 1;
    int channels = 3;
    int height = 48;
    int width = 48;

    void validate() const;
    bool operator==(const SyntheticConfig&) const = default;
};

/// Deterministic generator: same config (including seed) gives bitwise
/// identical pixel data. Every patch carries its scan_id; lesion ids are
/// unique across the set.
CandidateSet generate_synthetic(const SyntheticConfig& cfg);

}  // namespace cascnn
