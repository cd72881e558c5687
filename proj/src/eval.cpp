#include "cascnn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "cascnn/errors.hpp"

namespace cascnn {

FrocCurve froc(const std::vector<ScoreRecord>& records, std::size_t n_scans) {
    if (n_scans == 0) throw EvalError("froc: n_scans must be at least 1");
    std::size_t n_positives = 0;
    for (const auto& r : records) {
        if (r.rejected() && r.score != 0.0)
            throw EvalError("froc: rejected record with non-zero score: " + r.lesion_id);
        if (r.label == 1) ++n_positives;
    }
    if (n_positives == 0) throw EvalError("froc: no positive-labeled records");

    // sort scores descending; sweep accumulates tp/fp per distinct threshold
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].score > records[b].score;
    });

    FrocCurve curve;
    curve.n_scans = n_scans;
    curve.n_positives = n_positives;

    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double t = records[order[i]].score;
        while (i < order.size() && records[order[i]].score == t) {
            if (records[order[i]].label == 1)
                ++tp;
            else
                ++fp;
            ++i;
        }
        FrocPoint pt;
        pt.threshold = t;
        pt.tp = tp;
        pt.fp = fp;
        pt.sensitivity = static_cast<double>(tp) / static_cast<double>(n_positives);
        pt.fp_per_scan = static_cast<double>(fp) / static_cast<double>(n_scans);
        if (curve.points.empty() || !(curve.points.back().tp == tp && curve.points.back().fp == fp))
            curve.points.push_back(pt);
    }
    return curve;
}

double sensitivity_at(const FrocCurve& curve, double fp_per_scan) {
    if (fp_per_scan < 0.0) throw EvalError("sensitivity_at: fp_per_scan must be non-negative");
    double best = 0.0;
    for (const auto& pt : curve.points)
        if (pt.fp_per_scan <= fp_per_scan) best = std::max(best, pt.sensitivity);
    return best;
}

std::size_t Histogram::total() const {
    std::size_t n = 0;
    for (std::size_t c : counts) n += c;
    return n;
}

Histogram histogram(const std::vector<double>& scores, int n_bins) {
    if (n_bins < 1) throw ConfigError("histogram: n_bins must be at least 1");
    Histogram h;
    h.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i)
        h.bin_edges[static_cast<std::size_t>(i)] = static_cast<double>(i) / n_bins;
    h.counts.assign(static_cast<std::size_t>(n_bins), 0);
    for (double s : scores) {
        if (!(s >= 0.0 && s <= 1.0))
            throw DataError("histogram: score outside [0,1]: " + std::to_string(s));
        int bin = static_cast<int>(std::floor(s * n_bins));
        bin = std::min(bin, n_bins - 1);  // right edge of the last bin is inclusive
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

std::string stage_table_csv(const std::vector<StageStats>& stats) {
    std::ostringstream out;
    out << "stage,non_nodules_before,non_nodules_after,nodules_before,nodules_after,"
           "sigma,threshold\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        out << (i + 1) << ',' << s.n_non_nodule_before << ',' << s.n_non_nodule_after << ','
            << s.n_nodule_before << ',' << s.n_nodule_after << ',' << s.sigma << ','
            << s.threshold << '\n';
    }
    return out.str();
}

}  // namespace cascnn
