#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cascnn/augment.hpp"
#include "cascnn/patch.hpp"

namespace cascnn {

/// Keeps a uniformly random size-n subset of the given class (without
/// replacement, original order preserved); the other class is untouched.
/// Throws SamplingError when n exceeds the class count.
CandidateSet subsample(const CandidateSet& set, int label, std::size_t n, std::uint64_t seed);

/// Multiplies the given class by `factor`: every patch of the class stays and
/// contributes (factor-1) rotated/scaled copies, appended after the original
/// patches. The other class is untouched.
CandidateSet oversample_augment(const CandidateSet& set, int label, int factor,
                                const AugmentParams& params, std::uint64_t seed);

/// Training set for a selective stage: `per_fold_negatives` non-nodules
/// subsampled from each training fold, plus all training-fold nodules
/// oversampled by `oversample_factor`. Emits a warning (not an error) when
/// the result fails to actually invert the class ratio. Throws SamplingError
/// when a fold has fewer negatives than requested.
CandidateSet build_inverse_imbalanced(const std::vector<CandidateSet>& train_folds,
                                      std::size_t per_fold_negatives, int oversample_factor,
                                      const AugmentParams& params, std::uint64_t seed,
                                      std::vector<std::string>* warnings = nullptr);

/// Training set for the final/baseline classifier: nodules oversampled by
/// `oversample_factor`, non-nodules subsampled to exactly that count. When
/// fewer negatives are available, uses all of them and warns.
CandidateSet build_balanced(const std::vector<CandidateSet>& train_folds, int oversample_factor,
                            const AugmentParams& params, std::uint64_t seed,
                            std::vector<std::string>* warnings = nullptr);

}  // namespace cascnn
