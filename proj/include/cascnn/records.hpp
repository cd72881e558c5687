#pragma once

#include <cstddef>
#include <string>

namespace cascnn {

/// Per-stage filtering bookkeeping. After-counts never exceed before-counts.
struct StageStats {
    std::size_t n_nodule_before = 0;
    std::size_t n_nodule_after = 0;
    std::size_t n_non_nodule_before = 0;
    std::size_t n_non_nodule_after = 0;
    double sigma = 0.0;
    double threshold = 0.0;

    bool operator==(const StageStats&) const = default;
};

/// Final verdict for one candidate. rejected_at is the index of the stage
/// whose threshold removed it (-1 when it reached the final classifier);
/// rejected candidates always carry score 0.
struct ScoreRecord {
    std::string lesion_id;
    std::string scan_id;
    int label = 0;
    double score = 0.0;
    int rejected_at = -1;

    bool rejected() const { return rejected_at >= 0; }
    bool operator==(const ScoreRecord&) const = default;
};

}  // namespace cascnn
