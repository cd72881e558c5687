#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "cascnn/patch.hpp"

namespace cascnn {

enum class SplitGranularity { lesion, scan };

/// Maps every non-augmented lesion to a fold in [0,k). Augmented patches
/// inherit the fold of their origin via lineage.
struct FoldAssignment {
    int k = 0;
    std::unordered_map<std::string, int> fold_of;

    /// Fold of a patch, following augmented_from lineage when needed.
    /// Throws RoutingError for unknown lesions.
    int fold_for(const Patch& p) const;

    bool covers(const Patch& p) const;
};

/// Stratified k-fold split: per class, fold sizes differ by at most one.
/// Deterministic in the seed. With scan granularity, whole scans are assigned
/// to folds instead (stratification then holds on scan counts, not classes).
/// Throws SplitError when a class (or the scan pool) has fewer members than k.
FoldAssignment kfold_split(const CandidateSet& set, int k, std::uint64_t seed,
                           SplitGranularity granularity = SplitGranularity::lesion);

}  // namespace cascnn
