#include "cascnn/resample.hpp"

#include <algorithm>
#include <numeric>

#include "cascnn/errors.hpp"
#include "cascnn/rng.hpp"

namespace cascnn {

namespace {

void warn(std::vector<std::string>* warnings, std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
}

}  // namespace

CandidateSet subsample(const CandidateSet& set, int label, std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> class_indices;
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set[i].label == label) class_indices.push_back(i);
    if (n > class_indices.size())
        throw SamplingError("subsample: requested " + std::to_string(n) + " of class " +
                            std::to_string(label) + " but only " +
                            std::to_string(class_indices.size()) + " available");

    Rng rng(mix_seed(seed, 0x41));
    rng.shuffle(class_indices);
    class_indices.resize(n);
    std::sort(class_indices.begin(), class_indices.end());

    CandidateSet out;
    std::size_t next = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i].label != label) {
            out.push_back(set.ptr(i));
        } else if (next < class_indices.size() && class_indices[next] == i) {
            out.push_back(set.ptr(i));
            ++next;
        }
    }
    return out;
}

CandidateSet oversample_augment(const CandidateSet& set, int label, int factor,
                                const AugmentParams& params, std::uint64_t seed) {
    if (factor < 1) throw ConfigError("oversample_augment: factor must be at least 1");
    params.validate();

    CandidateSet out;
    for (std::size_t i = 0; i < set.size(); ++i) out.push_back(set.ptr(i));
    if (factor == 1) return out;

    Rng rng(mix_seed(seed, 0x42));
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i].label != label) continue;
        for (int copy = 1; copy < factor; ++copy) {
            const double angle = rng.uniform(params.angle_min_deg, params.angle_max_deg);
            const double scale = rng.uniform(params.scale_min, params.scale_max);
            out.add(augment_patch(set[i], angle, scale, copy));
        }
    }
    return out;
}

CandidateSet build_inverse_imbalanced(const std::vector<CandidateSet>& train_folds,
                                      std::size_t per_fold_negatives, int oversample_factor,
                                      const AugmentParams& params, std::uint64_t seed,
                                      std::vector<std::string>* warnings) {
    if (train_folds.empty())
        throw ConfigError("build_inverse_imbalanced: no training folds");

    CandidateSet out;
    for (std::size_t f = 0; f < train_folds.size(); ++f) {
        const std::size_t have = train_folds[f].counts().non_nodules;
        if (have < per_fold_negatives)
            throw SamplingError("build_inverse_imbalanced: fold " + std::to_string(f) +
                                " has " + std::to_string(have) + " non-nodules, needs " +
                                std::to_string(per_fold_negatives));
        CandidateSet sub = subsample(train_folds[f], 0, per_fold_negatives, mix_seed(seed, 0x43, f));
        for (std::size_t i = 0; i < sub.size(); ++i)
            if (sub[i].label == 0) out.push_back(sub.ptr(i));
    }

    CandidateSet positives;
    for (const auto& fold : train_folds)
        for (std::size_t i = 0; i < fold.size(); ++i)
            if (fold[i].label == 1) positives.push_back(fold.ptr(i));
    CandidateSet oversampled =
        oversample_augment(positives, 1, oversample_factor, params, mix_seed(seed, 0x44));
    for (std::size_t i = 0; i < oversampled.size(); ++i) out.push_back(oversampled.ptr(i));

    const ClassCounts counts = out.counts();
    if (counts.nodules <= counts.non_nodules)
        warn(warnings, "inverse-imbalanced set is not inverted: " +
                           std::to_string(counts.nodules) + " nodules vs " +
                           std::to_string(counts.non_nodules) + " non-nodules");
    return out;
}

CandidateSet build_balanced(const std::vector<CandidateSet>& train_folds, int oversample_factor,
                            const AugmentParams& params, std::uint64_t seed,
                            std::vector<std::string>* warnings) {
    if (train_folds.empty()) throw ConfigError("build_balanced: no training folds");

    CandidateSet pooled;
    for (const auto& fold : train_folds)
        for (std::size_t i = 0; i < fold.size(); ++i) pooled.push_back(fold.ptr(i));

    CandidateSet positives;
    for (std::size_t i = 0; i < pooled.size(); ++i)
        if (pooled[i].label == 1) positives.push_back(pooled.ptr(i));
    CandidateSet oversampled =
        oversample_augment(positives, 1, oversample_factor, params, mix_seed(seed, 0x45));

    const std::size_t target = oversampled.counts().nodules;
    const std::size_t negatives_available = pooled.counts().non_nodules;
    std::size_t take = target;
    if (negatives_available < target) {
        take = negatives_available;
        warn(warnings, "build_balanced: only " + std::to_string(negatives_available) +
                           " non-nodules available for a target of " + std::to_string(target) +
                           "; using all of them");
    }

    CandidateSet negatives_only;
    for (std::size_t i = 0; i < pooled.size(); ++i)
        if (pooled[i].label == 0) negatives_only.push_back(pooled.ptr(i));
    CandidateSet negatives = subsample(negatives_only, 0, take, mix_seed(seed, 0x46));

    CandidateSet out;
    for (std::size_t i = 0; i < negatives.size(); ++i) out.push_back(negatives.ptr(i));
    for (std::size_t i = 0; i < oversampled.size(); ++i) out.push_back(oversampled.ptr(i));
    return out;
}

}  // namespace cascnn
