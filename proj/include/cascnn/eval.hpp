#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cascnn/records.hpp"

namespace cascnn {

/// One FROC operating point: everything scoring >= threshold is predicted
/// positive.
struct FrocPoint {
    double threshold = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    double sensitivity = 0.0;
    double fp_per_scan = 0.0;

    bool operator==(const FrocPoint&) const = default;
};

/// Operating points sorted by fp_per_scan ascending; sensitivity is
/// non-decreasing along the curve.
struct FrocCurve {
    std::vector<FrocPoint> points;
    std::size_t n_scans = 0;
    std::size_t n_positives = 0;

    bool operator==(const FrocCurve&) const = default;
};

/// Sweeps the decision threshold over the distinct observed scores
/// (descending) and emits one operating point per threshold. Rejected records
/// carry score 0 and are predicted negative at every threshold above 0.
/// Throws EvalError when there are no positive-labeled records.
FrocCurve froc(const std::vector<ScoreRecord>& records, std::size_t n_scans);

/// Step-function lookup: the largest sensitivity among points with
/// fp_per_scan <= the query; 0 when no point qualifies.
double sensitivity_at(const FrocCurve& curve, double fp_per_scan);

/// Uniform-bin histogram over [0,1]; the last bin includes its right edge.
struct Histogram {
    std::vector<double> bin_edges;       // n_bins + 1 ascending edges
    std::vector<std::size_t> counts;     // one per bin

    std::size_t total() const;
    bool operator==(const Histogram&) const = default;
};

/// Throws DataError on scores outside [0,1].
Histogram histogram(const std::vector<double>& scores, int n_bins);

/// CSV with one row per stage: stage ordinal, per-class before/after counts,
/// sigma and threshold.
std::string stage_table_csv(const std::vector<StageStats>& stats);

}  // namespace cascnn
