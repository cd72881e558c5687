#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "cascnn/tensor.hpp"

namespace cascnn {

/// One candidate lesion: pixel block [C,H,W] with intensities in [0,1],
/// a class label (0 non-nodule, 1 nodule) and identity. augmented_from is
/// non-empty iff the patch was produced by augmentation, and names the
/// original (non-augmented) ancestor.
struct Patch {
    Tensor pixels;
    int label = 0;
    std::string scan_id;
    std::string lesion_id;
    std::string augmented_from;

    bool is_augmented() const { return !augmented_from.empty(); }
    const std::string& base_lesion_id() const {
        return is_augmented() ? augmented_from : lesion_id;
    }
};

using PatchPtr = std::shared_ptr<const Patch>;

struct ClassCounts {
    std::size_t nodules = 0;
    std::size_t non_nodules = 0;
    std::size_t total() const { return nodules + non_nodules; }
    bool operator==(const ClassCounts&) const = default;
};

/// Ordered, immutable-element collection of patches. Patches are shared, so
/// filtering and subsampling copy pointers, not pixels. Class counts are
/// maintained incrementally; recount() exists to check the bookkeeping.
class CandidateSet {
public:
    CandidateSet() = default;

    void push_back(PatchPtr p);
    void add(Patch p) { push_back(std::make_shared<const Patch>(std::move(p))); }

    std::size_t size() const { return patches_.size(); }
    bool empty() const { return patches_.empty(); }
    const Patch& operator[](std::size_t i) const { return *patches_[i]; }
    const PatchPtr& ptr(std::size_t i) const { return patches_[i]; }

    auto begin() const { return patches_.begin(); }
    auto end() const { return patches_.end(); }

    const ClassCounts& counts() const { return counts_; }
    ClassCounts recount() const;

    std::unordered_set<std::string> scan_ids() const;
    std::size_t n_scans() const { return scan_ids().size(); }

    /// Checks labels, uniform pixel dimensions, and uniqueness of
    /// non-augmented lesion ids. Throws DataError on violation.
    void validate() const;

private:
    std::vector<PatchPtr> patches_;
    ClassCounts counts_;
};

}  // namespace cascnn
