#include "cascnn/folds.hpp"

#include <algorithm>
#include <vector>

#include "cascnn/errors.hpp"
#include "cascnn/rng.hpp"

namespace cascnn {

int FoldAssignment::fold_for(const Patch& p) const {
    auto it = fold_of.find(p.lesion_id);
    if (it == fold_of.end() && p.is_augmented()) it = fold_of.find(p.augmented_from);
    if (it == fold_of.end())
        throw RoutingError("lesion not covered by the fold assignment: " + p.lesion_id);
    return it->second;
}

bool FoldAssignment::covers(const Patch& p) const {
    return fold_of.count(p.lesion_id) > 0 ||
           (p.is_augmented() && fold_of.count(p.augmented_from) > 0);
}

FoldAssignment kfold_split(const CandidateSet& set, int k, std::uint64_t seed,
                           SplitGranularity granularity) {
    if (k < 2) throw SplitError("kfold_split: k must be at least 2");

    FoldAssignment fa;
    fa.k = k;
    Rng rng(mix_seed(seed, 0x31));

    if (granularity == SplitGranularity::scan) {
        // assign whole scans round-robin after a shuffle; lesions inherit
        std::vector<std::string> scans;
        for (const auto& p : set)
            if (std::find(scans.begin(), scans.end(), p->scan_id) == scans.end())
                scans.push_back(p->scan_id);
        if (scans.size() < static_cast<std::size_t>(k))
            throw SplitError("kfold_split: fewer scans than folds");
        rng.shuffle(scans);
        std::unordered_map<std::string, int> scan_fold;
        for (std::size_t i = 0; i < scans.size(); ++i)
            scan_fold[scans[i]] = static_cast<int>(i % k);
        for (const auto& p : set)
            if (!p->is_augmented()) fa.fold_of[p->lesion_id] = scan_fold[p->scan_id];
        return fa;
    }

    // lesion granularity, stratified per class
    std::vector<std::string> per_class[2];
    for (const auto& p : set)
        if (!p->is_augmented()) per_class[p->label].push_back(p->lesion_id);
    for (int label = 0; label < 2; ++label)
        if (per_class[label].size() < static_cast<std::size_t>(k))
            throw SplitError("kfold_split: class " + std::to_string(label) + " has " +
                             std::to_string(per_class[label].size()) + " lesions, fewer than k=" +
                             std::to_string(k));
    for (int label = 0; label < 2; ++label) {
        rng.shuffle(per_class[label]);
        for (std::size_t i = 0; i < per_class[label].size(); ++i)
            fa.fold_of[per_class[label][i]] = static_cast<int>(i % k);
    }
    return fa;
}

}  // namespace cascnn
