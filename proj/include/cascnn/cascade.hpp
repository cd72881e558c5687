#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "cascnn/augment.hpp"
#include "cascnn/folds.hpp"
#include "cascnn/network.hpp"
#include "cascnn/patch.hpp"
#include "cascnn/records.hpp"

namespace cascnn {

/// Which class's predicted probabilities feed the sigma that sets a stage
/// threshold. `all` uses every candidate the stage scores (deployable: no
/// labels needed); the class-restricted variants exist for fidelity
/// experiments.
enum class SigmaPopulation { all, nodule, non_nodule };

const char* sigma_population_name(SigmaPopulation p);
SigmaPopulation sigma_population_from_name(const std::string& name);

/// One trained selective classifier with its frozen rejection threshold
/// (threshold = threshold_factor x population sigma of the score sample it
/// was computed from, clamped to [0,1]).
struct SelectiveStage {
    Network net;
    double threshold = 0.0;
    double threshold_factor = 0.0;
    StageStats stats;
    std::unordered_set<std::string> training_ids;  // base lesion ids, in-memory only
};

/// One fold's pipeline: the ordered selective stages plus the final
/// probability classifier trained on the surviving balanced pool.
struct FoldPipeline {
    std::vector<SelectiveStage> stages;
    Network final_net;
    std::unordered_set<std::string> final_training_ids;  // in-memory only
};

struct CascadeConfig {
    int n_stages = 4;
    double threshold_factor = 0.25;
    int per_fold_negatives = 200;
    int stage_oversample = 9;
    int final_oversample = 10;
    int k = 10;
    SigmaPopulation sigma_population = SigmaPopulation::all;
    SplitGranularity split_granularity = SplitGranularity::lesion;
    AugmentParams augment;
    std::vector<LayerSpec> arch;  // empty -> reference architecture
    TrainConfig stage_train;
    TrainConfig final_train;
    std::uint64_t seed = 1;
    int jobs = 1;

    void validate() const;
};

/// Per-fold bundle of selective stages plus a final classifier. A candidate
/// is always scored by the fold whose test partition contains it, so none of
/// the networks that score it ever saw it (or an augmentation of it) in
/// training.
struct CascadeModel {
    int k = 0;
    std::vector<FoldPipeline> folds;        // same stage count in every fold
    FoldAssignment fold_assignment;
    CascadeConfig config;                   // snapshot of the training config
    std::vector<StageStats> stage_table;    // per stage, counts summed over folds
    std::vector<std::string> warnings;      // degenerate-stage and resampling notes
    bool instrumented = false;              // training_ids populated (fresh training)

    int n_stages() const { return folds.empty() ? 0 : static_cast<int>(folds[0].stages.size()); }
};

/// factor x population standard deviation of the probabilities, clamped to
/// [0,1]. Computed in double precision. Throws EvalError on an empty sample.
double compute_threshold(const std::vector<double>& probs, double factor);

/// Class-1 probability for every patch, in set order, dropout off.
std::vector<double> score_set(const Network& net, const CandidateSet& set);

struct FilterResult {
    CandidateSet kept;
    CandidateSet removed;
    StageStats stats;
};

/// Splits a set by `prob >= threshold` (boundary kept). kept and removed
/// partition the input in order. Throws EvalError on a length mismatch.
FilterResult filter_set(const CandidateSet& set, const std::vector<double>& probs,
                        double threshold);

/// Trains one selective stage for `fold`: the network learns from an
/// inverse-imbalanced build over the pool's training partitions, then scores
/// the pool partition this fold is responsible for; the threshold is frozen
/// from those scores. Throws DegenerateStageError when the training partition
/// has a single class, SamplingError when a training fold cannot supply
/// per_fold_negatives.
SelectiveStage train_stage(const CandidateSet& pool, const FoldAssignment& fold_assignment,
                           int fold, const CascadeConfig& cfg, std::uint64_t stage_seed);

/// Runs the whole training procedure: k-fold split, n_stages rounds of
/// {train per-fold stages on the shared pool, filter each fold's partition by
/// its frozen threshold}, then per-fold final classifiers trained on a
/// balanced build of the surviving pool. If a stage becomes untrainable
/// mid-cascade the cascade stops early with the completed stages and a
/// warning in the model.
CascadeModel train_cascade(const CandidateSet& data, const CascadeConfig& cfg);

/// Baseline: the zero-stage cascade (balanced final classifiers only).
CascadeModel train_baseline(const CandidateSet& data, CascadeConfig cfg);

/// Scores every candidate through its test fold's pipeline. A score below
/// any stage threshold rejects the candidate (rejected_at = stage index,
/// score = 0); survivors get the final network's class-1 probability.
/// Throws RoutingError for lesions the fold assignment does not cover.
std::vector<ScoreRecord> predict_all(const CascadeModel& model, const CandidateSet& data);

struct HygieneReport {
    std::size_t checks = 0;
    std::size_t violations = 0;
    std::vector<std::string> examples;  // first few offending lesion ids
};

/// Verifies that no candidate (or anything in its augmentation lineage) is
/// scored by a network whose training set contained it. Requires an
/// instrumented (freshly trained) model.
HygieneReport audit_fold_hygiene(const CascadeModel& model, const CandidateSet& data);

}  // namespace cascnn
