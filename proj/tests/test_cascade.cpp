#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cascnn/cascade.hpp"
#include "cascnn/errors.hpp"
#include "cascnn/model_io.hpp"
#include "cascnn/presets.hpp"
#include "cascnn/rng.hpp"
#include "cascnn/synthetic.hpp"

using namespace cascnn;
namespace fs = std::filesystem;

namespace {

SyntheticConfig small_data_config(std::uint64_t seed = 11) {
    SyntheticConfig cfg;
    cfg.n_scans = 10;
    cfg.positives_per_scan = 2;
    cfg.negatives_per_scan = 40;
    cfg.hard_negative_fraction = 0.2;
    cfg.height = cfg.width = 16;
    cfg.seed = seed;
    return cfg;
}

CascadeConfig small_cascade_config(std::uint64_t seed = 17) {
    CascadeConfig cfg;
    cfg.n_stages = 2;
    cfg.k = 3;
    cfg.per_fold_negatives = 30;
    cfg.stage_oversample = 5;
    cfg.final_oversample = 5;
    cfg.arch = {LayerSpec::conv(4, 3), LayerSpec::relu(),    LayerSpec::maxpool(),
                LayerSpec::flatten(),  LayerSpec::dense(16), LayerSpec::relu(),
                LayerSpec::dense(2),   LayerSpec::softmax()};
    cfg.stage_train.epochs = 8;
    cfg.stage_train.batch_size = 16;
    cfg.stage_train.learning_rate = 0.1f;
    cfg.stage_train.dropout_rate = 0.0f;
    cfg.final_train = cfg.stage_train;
    cfg.seed = seed;
    return cfg;
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("compute_threshold reproduces the sigma=0.4 -> 0.1 anchor exactly") {
    // {0.1, 0.9} has mean 0.5 and population sigma exactly 0.4
    CHECK(compute_threshold({0.1, 0.9}, 0.25) == 0.1);

    // constant sample: sigma 0, nothing filtered
    CHECK(compute_threshold({0.42, 0.42, 0.42}, 0.25) == 0.0);

    // two-point mass at 0 and 1: sigma 0.5
    CHECK(compute_threshold({0.0, 0.0, 1.0, 1.0}, 0.25) == 0.125);

    CHECK_THROWS_AS(compute_threshold({}, 0.25), EvalError);

    // an independent mean/σ recomputation agrees to 1e-6 on random samples
    Rng rng(7);
    std::vector<double> probs(257);
    for (auto& p : probs) p = rng.uniform();
    double mean = 0.0;
    for (double p : probs) mean += p;
    mean /= static_cast<double>(probs.size());
    double var = 0.0;
    for (double p : probs) var += (p - mean) * (p - mean);
    const double sigma = std::sqrt(var / static_cast<double>(probs.size()));
    CHECK(std::fabs(compute_threshold(probs, 0.25) - 0.25 * sigma) <= 1e-6);
}

TEST_CASE("score_set basics") {
    CandidateSet set = generate_synthetic(small_data_config());
    Network net(set[0].pixels.shape(),
                {LayerSpec::flatten(), LayerSpec::dense(2), LayerSpec::softmax()}, 3);

    CHECK(score_set(net, CandidateSet{}).empty());

    // zero weights: every probability is exactly one half
    for (auto& p : net.params()) {
        if (p.empty()) continue;
        std::fill(p.weights.values().begin(), p.weights.values().end(), 0.0f);
        std::fill(p.bias.values().begin(), p.bias.values().end(), 0.0f);
    }
    std::vector<double> scores = score_set(net, set);
    REQUIRE(scores.size() == set.size());
    for (double s : scores) CHECK(s == 0.5);

    CHECK(score_set(net, set) == scores);  // bitwise repeatable
}

TEST_CASE("filter_set boundaries and partition bookkeeping") {
    CandidateSet set;
    for (int i = 0; i < 3; ++i) {
        Patch p;
        p.pixels = Tensor({1, 2, 2});
        p.label = i == 2 ? 1 : 0;
        p.scan_id = "s";
        p.lesion_id = "l" + std::to_string(i);
        set.add(std::move(p));
    }

    FilterResult all = filter_set(set, {0.3, 0.4, 0.5}, 0.0);
    CHECK(all.kept.size() == 3);
    CHECK(all.removed.empty());

    FilterResult none = filter_set(set, {0.3, 0.4, 0.5}, 1.5);
    CHECK(none.kept.empty());
    CHECK(none.removed.size() == 3);

    // boundary rule: score exactly at the threshold is kept
    FilterResult some = filter_set(set, {0.05, 0.1, 0.9}, 0.1);
    REQUIRE(some.kept.size() == 2);
    CHECK(some.kept[0].lesion_id == "l1");
    CHECK(some.kept[1].lesion_id == "l2");
    REQUIRE(some.removed.size() == 1);
    CHECK(some.removed[0].lesion_id == "l0");

    // partition invariant: kept + removed equals the input, per class
    CHECK(some.stats.n_nodule_before ==
          some.stats.n_nodule_after + (some.removed.counts().nodules));
    CHECK(some.stats.n_non_nodule_before ==
          some.stats.n_non_nodule_after + (some.removed.counts().non_nodules));

    CHECK_THROWS_AS(filter_set(set, {0.1, 0.2}, 0.5), EvalError);
}

TEST_CASE("train_stage: zero factor filters nothing and sigma is recomputable") {
    CandidateSet data = generate_synthetic(small_data_config());
    CascadeConfig cfg = small_cascade_config();
    FoldAssignment fa = kfold_split(data, cfg.k, 1);

    CascadeConfig zero = cfg;
    zero.threshold_factor = 0.0;
    SelectiveStage stage = train_stage(data, fa, 0, zero, 99);
    CHECK(stage.threshold == 0.0);
    CHECK(stage.stats.n_nodule_after == stage.stats.n_nodule_before);
    CHECK(stage.stats.n_non_nodule_after == stage.stats.n_non_nodule_before);

    // sigma recorded in the stats must match an independent recomputation
    SelectiveStage s2 = train_stage(data, fa, 1, cfg, 123);
    CandidateSet partition;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (fa.fold_for(data[i]) == 1) partition.push_back(data.ptr(i));
    std::vector<double> scores = score_set(s2.net, partition);
    double mean = 0.0;
    for (double v : scores) mean += v;
    mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double v : scores) var += (v - mean) * (v - mean);
    const double sigma = std::sqrt(var / static_cast<double>(scores.size()));
    CHECK(std::fabs(s2.stats.sigma - sigma) <= 1e-12);
    CHECK(std::fabs(s2.threshold - std::clamp(0.25 * sigma, 0.0, 1.0)) <= 1e-12);

    // the filter removed at least one obvious negative
    CHECK(s2.stats.n_non_nodule_after < s2.stats.n_non_nodule_before);
}

TEST_CASE("train_cascade on the small synthetic pool") {
    CandidateSet data = generate_synthetic(small_data_config());
    CascadeConfig cfg = small_cascade_config();
    CascadeModel model = train_cascade(data, cfg);

    REQUIRE(model.n_stages() == 2);
    REQUIRE(model.stage_table.size() == 2);
    for (const auto& pipe : model.folds) CHECK(pipe.stages.size() == 2);

    // partition invariant per stage row, and strict negative reduction
    const auto& t = model.stage_table;
    CHECK(t[0].n_non_nodule_before == data.counts().non_nodules);
    CHECK(t[0].n_nodule_before == data.counts().nodules);
    for (std::size_t s = 0; s < t.size(); ++s) {
        CHECK(t[s].n_non_nodule_after <= t[s].n_non_nodule_before);
        CHECK(t[s].n_nodule_after <= t[s].n_nodule_before);
        if (s > 0) {
            CHECK(t[s].n_non_nodule_before == t[s - 1].n_non_nodule_after);
            CHECK(t[s].n_nodule_before == t[s - 1].n_nodule_after);
        }
    }
    CHECK(t.back().n_non_nodule_after < t[0].n_non_nodule_before);

    // records: rejected implies score zero; every record routed
    std::vector<ScoreRecord> records = predict_all(model, data);
    REQUIRE(records.size() == data.size());
    for (const auto& r : records)
        if (r.rejected()) CHECK(r.score == 0.0);

    // fold hygiene: instrumented audit reports zero violations
    HygieneReport audit = audit_fold_hygiene(model, data);
    CHECK(audit.checks > 0);
    CHECK(audit.violations == 0);
}

TEST_CASE("zero-stage cascade equals the baseline trainer record for record") {
    CandidateSet data = generate_synthetic(small_data_config(23));
    CascadeConfig cfg = small_cascade_config(29);
    cfg.n_stages = 0;

    CascadeModel zero = train_cascade(data, cfg);
    CHECK(zero.n_stages() == 0);
    CHECK(zero.stage_table.empty());

    CascadeConfig base_cfg = small_cascade_config(29);
    base_cfg.n_stages = 5;  // train_baseline must force this to zero
    CascadeModel baseline = train_baseline(data, base_cfg);
    CHECK(baseline.n_stages() == 0);

    std::vector<ScoreRecord> a = predict_all(zero, data);
    std::vector<ScoreRecord> b = predict_all(baseline, data);
    CHECK(a == b);
    for (const auto& r : a) CHECK(!r.rejected());
}

TEST_CASE("zero thresholds disable filtering: same final scores as a 0-stage run") {
    CandidateSet data = generate_synthetic(small_data_config(31));
    CascadeConfig cfg = small_cascade_config(37);
    cfg.threshold_factor = 0.0;

    CascadeModel cascade = train_cascade(data, cfg);
    CascadeConfig zero_cfg = small_cascade_config(37);
    zero_cfg.n_stages = 0;
    CascadeModel zero = train_cascade(data, zero_cfg);

    std::vector<ScoreRecord> a = predict_all(cascade, data);
    std::vector<ScoreRecord> b = predict_all(zero, data);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(!a[i].rejected());
        CHECK(a[i].score == b[i].score);
    }
}

TEST_CASE("predict_all rejects lesions outside the fold assignment") {
    CandidateSet data = generate_synthetic(small_data_config(41));
    CascadeConfig cfg = small_cascade_config(43);
    cfg.n_stages = 0;
    CascadeModel model = train_cascade(data, cfg);

    CandidateSet foreign;
    Patch p;
    p.pixels = data[0].pixels;
    p.label = 1;
    p.scan_id = "other";
    p.lesion_id = "not-in-training";
    foreign.add(std::move(p));
    CHECK_THROWS_AS(predict_all(model, foreign), RoutingError);
}

TEST_CASE("cascade stops early when the pool cannot feed another stage") {
    CandidateSet data = generate_synthetic(small_data_config(47));
    CascadeConfig cfg = small_cascade_config(53);
    cfg.n_stages = 4;
    cfg.per_fold_negatives = 120;  // each fold starts with ~133 negatives
    CascadeModel model = train_cascade(data, cfg);

    // filtering must eventually leave a fold short of 120 negatives
    CHECK(model.n_stages() < 4);
    bool flagged = false;
    for (const auto& w : model.warnings)
        if (w.find("stopped early") != std::string::npos) flagged = true;
    CHECK(flagged);

    // the truncated model is still fully usable
    std::vector<ScoreRecord> records = predict_all(model, data);
    CHECK(records.size() == data.size());
}

TEST_CASE("model directory round-trips and loaded models score identically") {
    CandidateSet data = generate_synthetic(small_data_config(59));
    CascadeConfig cfg = small_cascade_config(61);
    CascadeModel model = train_cascade(data, cfg);

    const auto dir = (fs::temp_directory_path() / "cascnn_model_rt").string();
    fs::remove_all(dir);
    save_model(model, dir);
    CascadeModel loaded = load_model(dir);

    CHECK(loaded.k == model.k);
    CHECK(loaded.n_stages() == model.n_stages());
    CHECK(loaded.stage_table == model.stage_table);
    CHECK(loaded.fold_assignment.fold_of == model.fold_assignment.fold_of);
    for (int f = 0; f < model.k; ++f) {
        for (int s = 0; s < model.n_stages(); ++s) {
            const auto& a = model.folds[f].stages[s];
            const auto& b = loaded.folds[f].stages[s];
            CHECK(a.threshold == b.threshold);
            for (std::size_t i = 0; i < a.net.params().size(); ++i)
                CHECK(a.net.params()[i].weights == b.net.params()[i].weights);
        }
        for (std::size_t i = 0; i < model.folds[f].final_net.params().size(); ++i)
            CHECK(model.folds[f].final_net.params()[i].weights ==
                  loaded.folds[f].final_net.params()[i].weights);
    }

    CHECK(predict_all(loaded, data) == predict_all(model, data));

    // audits require instrumentation, which does not survive serialization
    CHECK(!loaded.instrumented);
    CHECK_THROWS_AS(audit_fold_hygiene(loaded, data), EvalError);
    fs::remove_all(dir);
}

TEST_CASE("identical seeds give byte-identical model files") {
    CandidateSet data = generate_synthetic(small_data_config(67));
    CascadeConfig cfg = small_cascade_config(71);

    const auto dir_a = (fs::temp_directory_path() / "cascnn_det_a").string();
    const auto dir_b = (fs::temp_directory_path() / "cascnn_det_b").string();
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    save_model(train_cascade(data, cfg), dir_a);
    save_model(train_cascade(data, cfg), dir_b);

    CHECK(file_bytes(dir_a + "/manifest.json") == file_bytes(dir_b + "/manifest.json"));
    CHECK(file_bytes(dir_a + "/fold_0/stage_0.csnn") ==
          file_bytes(dir_b + "/fold_0/stage_0.csnn"));
    CHECK(file_bytes(dir_a + "/fold_2/final.csnn") == file_bytes(dir_b + "/fold_2/final.csnn"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("fold-parallel training gives identical results to sequential") {
    CandidateSet data = generate_synthetic(small_data_config(73));
    CascadeConfig cfg = small_cascade_config(79);
    cfg.jobs = 1;
    CascadeModel seq = train_cascade(data, cfg);
    cfg.jobs = 4;
    CascadeModel par = train_cascade(data, cfg);

    CHECK(seq.stage_table == par.stage_table);
    for (int f = 0; f < cfg.k; ++f) {
        for (int s = 0; s < seq.n_stages(); ++s)
            CHECK(seq.folds[f].stages[s].threshold == par.folds[f].stages[s].threshold);
        for (std::size_t i = 0; i < seq.folds[f].final_net.params().size(); ++i)
            CHECK(seq.folds[f].final_net.params()[i].weights ==
                  par.folds[f].final_net.params()[i].weights);
    }
    CHECK(predict_all(seq, data) == predict_all(par, data));
}
