#include "cascnn/patch.hpp"

#include "cascnn/errors.hpp"

namespace cascnn {

void CandidateSet::push_back(PatchPtr p) {
    if (!p) throw DataError("null patch");
    if (p->label == 1)
        ++counts_.nodules;
    else if (p->label == 0)
        ++counts_.non_nodules;
    else
        throw DataError("patch label outside {0,1}");
    patches_.push_back(std::move(p));
}

ClassCounts CandidateSet::recount() const {
    ClassCounts c;
    for (const auto& p : patches_) {
        if (p->label == 1)
            ++c.nodules;
        else
            ++c.non_nodules;
    }
    return c;
}

std::unordered_set<std::string> CandidateSet::scan_ids() const {
    std::unordered_set<std::string> ids;
    for (const auto& p : patches_) ids.insert(p->scan_id);
    return ids;
}

void CandidateSet::validate() const {
    std::unordered_set<std::string> seen;
    const std::vector<int>* dims = nullptr;
    for (const auto& p : patches_) {
        if (p->label != 0 && p->label != 1) throw DataError("patch label outside {0,1}");
        if (p->pixels.rank() != 3) throw DataError("patch pixels must be [C,H,W]");
        if (dims == nullptr)
            dims = &p->pixels.shape();
        else if (*dims != p->pixels.shape())
            throw DataError("patch dimensions not uniform within the set");
        if (!p->is_augmented() && !seen.insert(p->lesion_id).second)
            throw DataError("duplicate lesion_id among non-augmented patches: " + p->lesion_id);
    }
}

}  // namespace cascnn
