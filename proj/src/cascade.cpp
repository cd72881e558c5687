#include "cascnn/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "cascnn/errors.hpp"
#include "cascnn/presets.hpp"
#include "cascnn/resample.hpp"
#include "cascnn/rng.hpp"

namespace cascnn {

const char* sigma_population_name(SigmaPopulation p) {
    switch (p) {
        case SigmaPopulation::all: return "all";
        case SigmaPopulation::nodule: return "nodule";
        case SigmaPopulation::non_nodule: return "non_nodule";
    }
    return "?";
}

SigmaPopulation sigma_population_from_name(const std::string& name) {
    if (name == "all") return SigmaPopulation::all;
    if (name == "nodule") return SigmaPopulation::nodule;
    if (name == "non_nodule") return SigmaPopulation::non_nodule;
    throw ConfigError("unknown sigma population: " + name);
}

void CascadeConfig::validate() const {
    if (n_stages < 0) throw ConfigError("cascade: n_stages must be non-negative");
    if (!(threshold_factor >= 0.0)) throw ConfigError("cascade: threshold_factor must be >= 0");
    if (per_fold_negatives <= 0)
        throw ConfigError("cascade: per_fold_negatives must be positive");
    if (stage_oversample < 1 || final_oversample < 1)
        throw ConfigError("cascade: oversample factors must be at least 1");
    if (k < 2) throw ConfigError("cascade: k must be at least 2");
    if (jobs < 1) throw ConfigError("cascade: jobs must be at least 1");
    augment.validate();
}

double compute_threshold(const std::vector<double>& probs, double factor) {
    if (probs.empty()) throw EvalError("compute_threshold: empty probability sample");
    if (!(factor >= 0.0)) throw ConfigError("compute_threshold: factor must be >= 0");
    double mean = 0.0;
    for (double p : probs) mean += p;
    mean /= static_cast<double>(probs.size());
    double var = 0.0;
    for (double p : probs) var += (p - mean) * (p - mean);
    var /= static_cast<double>(probs.size());  // population variance
    const double threshold = factor * std::sqrt(var);
    return std::clamp(threshold, 0.0, 1.0);
}

std::vector<double> score_set(const Network& net, const CandidateSet& set) {
    std::vector<double> scores;
    scores.reserve(set.size());
    if (set.empty()) return scores;

    const auto& shape = set[0].pixels.shape();
    const std::size_t stride = shape_size(shape);
    constexpr std::size_t kChunk = 128;
    for (std::size_t begin = 0; begin < set.size(); begin += kChunk) {
        const std::size_t end = std::min(set.size(), begin + kChunk);
        Tensor batch({static_cast<int>(end - begin), shape[0], shape[1], shape[2]});
        for (std::size_t i = begin; i < end; ++i)
            std::copy(set[i].pixels.data(), set[i].pixels.data() + stride,
                      batch.data() + (i - begin) * stride);
        Tensor probs = forward(net, batch, Mode::infer);
        for (std::size_t i = 0; i < end - begin; ++i)
            scores.push_back(static_cast<double>(probs[i * 2 + 1]));
    }
    return scores;
}

FilterResult filter_set(const CandidateSet& set, const std::vector<double>& probs,
                        double threshold) {
    if (probs.size() != set.size())
        throw EvalError("filter_set: " + std::to_string(probs.size()) + " probabilities for " +
                        std::to_string(set.size()) + " patches");
    FilterResult r;
    const ClassCounts before = set.counts();
    r.stats.n_nodule_before = before.nodules;
    r.stats.n_non_nodule_before = before.non_nodules;
    r.stats.threshold = threshold;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (probs[i] >= threshold)
            r.kept.push_back(set.ptr(i));
        else
            r.removed.push_back(set.ptr(i));
    }
    const ClassCounts after = r.kept.counts();
    r.stats.n_nodule_after = after.nodules;
    r.stats.n_non_nodule_after = after.non_nodules;
    return r;
}

namespace {

// seed stream tags
constexpr std::uint64_t kSeedSplit = 0x52;
constexpr std::uint64_t kSeedStage = 0x60;
constexpr std::uint64_t kSeedFinal = 0x70;

struct StageTrainResult {
    SelectiveStage stage;
    std::vector<std::size_t> partition;  // pool indices scored by this fold
    std::vector<double> scores;          // aligned with partition
    std::vector<std::string> warnings;
};

std::vector<LayerSpec> effective_arch(const CascadeConfig& cfg) {
    return cfg.arch.empty() ? reference_arch(cfg.stage_train.dropout_rate) : cfg.arch;
}

std::unordered_set<std::string> base_ids(const CandidateSet& set) {
    std::unordered_set<std::string> ids;
    for (const auto& p : set) ids.insert(p->base_lesion_id());
    return ids;
}

TrainConfig clamp_batch(TrainConfig tc, std::size_t set_size) {
    if (static_cast<std::size_t>(tc.batch_size) > set_size)
        tc.batch_size = static_cast<int>(set_size);
    return tc;
}

/// Buckets the pool's patches by fold: out[f] holds fold-f patches;
/// `partition` receives the pool indices belonging to `fold`.
std::vector<CandidateSet> bucket_by_fold(const CandidateSet& pool, const FoldAssignment& fa,
                                         int fold, std::vector<std::size_t>* partition) {
    std::vector<CandidateSet> buckets(static_cast<std::size_t>(fa.k));
    if (partition) partition->clear();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const int f = fa.fold_for(pool[i]);
        buckets[static_cast<std::size_t>(f)].push_back(pool.ptr(i));
        if (partition && f == fold) partition->push_back(i);
    }
    return buckets;
}

double population_sigma(const std::vector<double>& sample) {
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= static_cast<double>(sample.size());
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(sample.size()));
}

StageTrainResult train_stage_scored(const CandidateSet& pool, const FoldAssignment& fa,
                                    int fold, const CascadeConfig& cfg,
                                    std::uint64_t stage_seed) {
    std::vector<std::string> warnings;
    std::vector<std::size_t> partition;
    std::vector<CandidateSet> buckets = bucket_by_fold(pool, fa, fold, &partition);

    std::vector<CandidateSet> train_folds;
    ClassCounts train_counts;
    for (int f = 0; f < fa.k; ++f) {
        if (f == fold) continue;
        train_counts.nodules += buckets[static_cast<std::size_t>(f)].counts().nodules;
        train_counts.non_nodules += buckets[static_cast<std::size_t>(f)].counts().non_nodules;
        train_folds.push_back(std::move(buckets[static_cast<std::size_t>(f)]));
    }
    if (train_counts.nodules == 0 || train_counts.non_nodules == 0)
        throw DegenerateStageError("stage training partition for fold " + std::to_string(fold) +
                                   " has a single class");

    CandidateSet stage_set = build_inverse_imbalanced(
        train_folds, static_cast<std::size_t>(cfg.per_fold_negatives), cfg.stage_oversample,
        cfg.augment, mix_seed(stage_seed, 1), &warnings);

    Network net(pool[0].pixels.shape(), effective_arch(cfg), mix_seed(stage_seed, 2));
    TrainConfig tc = clamp_batch(cfg.stage_train, stage_set.size());
    tc.seed = mix_seed(stage_seed, 3);
    TrainResult trained = train(std::move(net), stage_set, tc);

    CandidateSet eval_part;
    for (std::size_t idx : partition) eval_part.push_back(pool.ptr(idx));
    std::vector<double> scores = score_set(trained.net, eval_part);

    std::vector<double> sigma_sample;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int label = eval_part[i].label;
        if (cfg.sigma_population == SigmaPopulation::all ||
            (cfg.sigma_population == SigmaPopulation::nodule && label == 1) ||
            (cfg.sigma_population == SigmaPopulation::non_nodule && label == 0))
            sigma_sample.push_back(scores[i]);
    }

    double sigma = 0.0;
    double threshold = 0.0;
    if (!sigma_sample.empty()) {
        threshold = compute_threshold(sigma_sample, cfg.threshold_factor);
        sigma = population_sigma(sigma_sample);
    }

    FilterResult filtered = filter_set(eval_part, scores, threshold);
    filtered.stats.sigma = sigma;

    return StageTrainResult{
        SelectiveStage{std::move(trained.net), threshold, cfg.threshold_factor, filtered.stats,
                       base_ids(stage_set)},
        std::move(partition), std::move(scores), std::move(warnings)};
}

/// Runs fn(fold) for every fold, on up to `jobs` threads. Results/exceptions
/// land in per-fold slots, so the outcome is independent of scheduling.
template <class Fn>
void for_each_fold(int k, int jobs, Fn&& fn) {
    const int threads = std::max(1, std::min(jobs, k));
    if (threads == 1) {
        for (int f = 0; f < k; ++f) fn(f);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int f = t; f < k; f += threads) {
                try {
                    fn(f);
                } catch (...) {
                    errors[static_cast<std::size_t>(f)] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

SelectiveStage train_stage(const CandidateSet& pool, const FoldAssignment& fold_assignment,
                           int fold, const CascadeConfig& cfg, std::uint64_t stage_seed) {
    cfg.validate();
    return train_stage_scored(pool, fold_assignment, fold, cfg, stage_seed).stage;
}

CascadeModel train_cascade(const CandidateSet& data, const CascadeConfig& cfg) {
    cfg.validate();
    data.validate();
    const ClassCounts counts = data.counts();
    if (counts.nodules == 0 || counts.non_nodules == 0)
        throw TrainingError("train_cascade: both classes must be present");

    CascadeModel model;
    model.k = cfg.k;
    model.config = cfg;
    model.fold_assignment =
        kfold_split(data, cfg.k, mix_seed(cfg.seed, kSeedSplit), cfg.split_granularity);

    CandidateSet pool;
    for (std::size_t i = 0; i < data.size(); ++i) pool.push_back(data.ptr(i));

    std::vector<std::vector<SelectiveStage>> fold_stages(static_cast<std::size_t>(cfg.k));

    for (int stage = 0; stage < cfg.n_stages; ++stage) {
        std::vector<std::optional<StageTrainResult>> results(static_cast<std::size_t>(cfg.k));
        bool degenerate = false;
        std::string degenerate_reason;
        try {
            for_each_fold(cfg.k, cfg.jobs, [&](int f) {
                results[static_cast<std::size_t>(f)] = train_stage_scored(
                    pool, model.fold_assignment, f, cfg, mix_seed(cfg.seed, kSeedStage, stage, f));
            });
        } catch (const DegenerateStageError& e) {
            degenerate = true;
            degenerate_reason = e.what();
        } catch (const SamplingError& e) {
            degenerate = true;
            degenerate_reason = e.what();
        }
        if (degenerate) {
            model.warnings.push_back("cascade stopped early at stage " +
                                     std::to_string(stage + 1) + ": " + degenerate_reason);
            break;
        }

        // merge: each fold filters only its own partition of the shared pool
        std::vector<char> keep(pool.size(), 1);
        StageStats total;
        total.threshold = 0.0;
        for (int f = 0; f < cfg.k; ++f) {
            auto& r = *results[static_cast<std::size_t>(f)];
            for (std::size_t j = 0; j < r.partition.size(); ++j)
                keep[r.partition[j]] = r.scores[j] >= r.stage.threshold ? 1 : 0;
            total.n_nodule_before += r.stage.stats.n_nodule_before;
            total.n_nodule_after += r.stage.stats.n_nodule_after;
            total.n_non_nodule_before += r.stage.stats.n_non_nodule_before;
            total.n_non_nodule_after += r.stage.stats.n_non_nodule_after;
            total.sigma += r.stage.stats.sigma / cfg.k;          // mean over folds
            total.threshold += r.stage.stats.threshold / cfg.k;  // mean over folds
            for (auto& w : r.warnings)
                model.warnings.push_back("stage " + std::to_string(stage + 1) + " fold " +
                                         std::to_string(f) + ": " + w);
            fold_stages[static_cast<std::size_t>(f)].push_back(std::move(r.stage));
        }
        model.stage_table.push_back(total);

        CandidateSet next;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (keep[i]) next.push_back(pool.ptr(i));
        pool = std::move(next);
    }

    // final balanced classifiers on the surviving pool
    std::vector<std::optional<FoldPipeline>> pipelines(static_cast<std::size_t>(cfg.k));
    std::vector<std::vector<std::string>> final_warnings(static_cast<std::size_t>(cfg.k));
    for_each_fold(cfg.k, cfg.jobs, [&](int f) {
        std::vector<CandidateSet> buckets = bucket_by_fold(pool, model.fold_assignment, f, nullptr);
        std::vector<CandidateSet> train_folds;
        ClassCounts tc;
        for (int g = 0; g < cfg.k; ++g) {
            if (g == f) continue;
            tc.nodules += buckets[static_cast<std::size_t>(g)].counts().nodules;
            tc.non_nodules += buckets[static_cast<std::size_t>(g)].counts().non_nodules;
            train_folds.push_back(std::move(buckets[static_cast<std::size_t>(g)]));
        }
        if (tc.nodules == 0 || tc.non_nodules == 0)
            throw TrainingError("final classifier for fold " + std::to_string(f) +
                                ": surviving training partition has a single class");
        CandidateSet balanced =
            build_balanced(train_folds, cfg.final_oversample, cfg.augment,
                           mix_seed(cfg.seed, kSeedFinal, 1, f), &final_warnings[f]);
        Network net(data[0].pixels.shape(), effective_arch(cfg),
                    mix_seed(cfg.seed, kSeedFinal, 2, f));
        TrainConfig ftc = clamp_batch(cfg.final_train, balanced.size());
        ftc.seed = mix_seed(cfg.seed, kSeedFinal, 3, f);
        TrainResult trained = train(std::move(net), balanced, ftc);
        pipelines[static_cast<std::size_t>(f)] =
            FoldPipeline{std::move(fold_stages[static_cast<std::size_t>(f)]),
                         std::move(trained.net), base_ids(balanced)};
    });

    for (int f = 0; f < cfg.k; ++f) {
        for (auto& w : final_warnings[static_cast<std::size_t>(f)])
            model.warnings.push_back("final fold " + std::to_string(f) + ": " + w);
        model.folds.push_back(std::move(*pipelines[static_cast<std::size_t>(f)]));
    }
    model.instrumented = true;
    return model;
}

CascadeModel train_baseline(const CandidateSet& data, CascadeConfig cfg) {
    cfg.n_stages = 0;
    return train_cascade(data, cfg);
}

std::vector<ScoreRecord> predict_all(const CascadeModel& model, const CandidateSet& data) {
    std::vector<ScoreRecord> records(data.size());
    std::vector<std::vector<std::size_t>> by_fold(static_cast<std::size_t>(model.k));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int f = model.fold_assignment.fold_for(data[i]);  // throws RoutingError
        by_fold[static_cast<std::size_t>(f)].push_back(i);
        records[i].lesion_id = data[i].lesion_id;
        records[i].scan_id = data[i].scan_id;
        records[i].label = data[i].label;
    }

    for (int f = 0; f < model.k; ++f) {
        const FoldPipeline& pipe = model.folds[static_cast<std::size_t>(f)];
        std::vector<std::size_t> alive = by_fold[static_cast<std::size_t>(f)];
        for (std::size_t s = 0; s < pipe.stages.size() && !alive.empty(); ++s) {
            CandidateSet subset;
            for (std::size_t idx : alive) subset.push_back(data.ptr(idx));
            const std::vector<double> scores = score_set(pipe.stages[s].net, subset);
            std::vector<std::size_t> survivors;
            for (std::size_t j = 0; j < alive.size(); ++j) {
                if (scores[j] < pipe.stages[s].threshold) {
                    records[alive[j]].rejected_at = static_cast<int>(s);
                    records[alive[j]].score = 0.0;
                } else {
                    survivors.push_back(alive[j]);
                }
            }
            alive = std::move(survivors);
        }
        if (!alive.empty()) {
            CandidateSet subset;
            for (std::size_t idx : alive) subset.push_back(data.ptr(idx));
            const std::vector<double> scores = score_set(pipe.final_net, subset);
            for (std::size_t j = 0; j < alive.size(); ++j)
                records[alive[j]].score = scores[j];
        }
    }
    return records;
}

HygieneReport audit_fold_hygiene(const CascadeModel& model, const CandidateSet& data) {
    if (!model.instrumented)
        throw EvalError("audit_fold_hygiene: model is not instrumented (loaded from disk?)");
    HygieneReport report;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int f = model.fold_assignment.fold_for(data[i]);
        const FoldPipeline& pipe = model.folds[static_cast<std::size_t>(f)];
        const std::string& base = data[i].base_lesion_id();
        for (const auto& stage : pipe.stages) {
            ++report.checks;
            if (stage.training_ids.count(base)) {
                ++report.violations;
                if (report.examples.size() < 5) report.examples.push_back(base);
            }
        }
        ++report.checks;
        if (pipe.final_training_ids.count(base)) {
            ++report.violations;
            if (report.examples.size() < 5) report.examples.push_back(base);
        }
    }
    return report;
}

}  // namespace cascnn
