#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cascnn/errors.hpp"
#include "cascnn/eval.hpp"
#include "cascnn/rng.hpp"
#include "froc_oracle.hpp"

using namespace cascnn;

namespace {

ScoreRecord rec(const std::string& lesion, const std::string& scan, int label, double score,
                int rejected_at = -1) {
    ScoreRecord r;
    r.lesion_id = lesion;
    r.scan_id = scan;
    r.label = label;
    r.score = rejected_at >= 0 ? 0.0 : score;
    r.rejected_at = rejected_at;
    return r;
}

std::vector<ScoreRecord> random_records(Rng& rng, std::size_t max_records,
                                        std::size_t max_scans) {
    const std::size_t n = 2 + rng.uniform_index(max_records - 1);
    const std::size_t scans = 1 + rng.uniform_index(max_scans);
    std::vector<ScoreRecord> records;
    bool has_positive = false;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = rng.uniform() < 0.3 ? 1 : 0;
        double score;
        if (rng.uniform() < 0.5) {
            // draw from a small discrete set to exercise tied scores
            static const double levels[] = {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
            score = levels[rng.uniform_index(7)];
        } else {
            score = rng.uniform();
        }
        int rejected_at = -1;
        if (rng.uniform() < 0.15) rejected_at = static_cast<int>(rng.uniform_index(3));
        records.push_back(rec("l" + std::to_string(i),
                              "s" + std::to_string(rng.uniform_index(scans)), label, score,
                              rejected_at));
        if (label == 1) has_positive = true;
    }
    if (!has_positive) records.push_back(rec("lp", "s0", 1, 0.5));
    return records;
}

}  // namespace

TEST_CASE("froc on a perfect scorer contains the (0,1) operating point") {
    std::vector<ScoreRecord> records;
    for (int i = 0; i < 5; ++i) records.push_back(rec("p" + std::to_string(i), "s0", 1, 1.0));
    for (int i = 0; i < 9; ++i) records.push_back(rec("n" + std::to_string(i), "s1", 0, 0.0));
    FrocCurve curve = froc(records, 2);
    REQUIRE(!curve.points.empty());
    CHECK(curve.points[0].fp_per_scan == 0.0);
    CHECK(curve.points[0].sensitivity == 1.0);
}

TEST_CASE("froc with all scores equal yields a single operating point") {
    std::vector<ScoreRecord> records;
    for (int i = 0; i < 3; ++i) records.push_back(rec("p" + std::to_string(i), "s0", 1, 0.7));
    for (int i = 0; i < 8; ++i) records.push_back(rec("n" + std::to_string(i), "s1", 0, 0.7));
    FrocCurve curve = froc(records, 4);
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].sensitivity == 1.0);
    CHECK(curve.points[0].fp_per_scan == 8.0 / 4.0);
}

TEST_CASE("froc six-record hand example: frozen values and oracle agreement") {
    std::vector<ScoreRecord> records = {
        rec("a", "s0", 1, 0.9), rec("b", "s0", 0, 0.8), rec("c", "s1", 1, 0.7),
        rec("d", "s1", 0, 0.3), rec("e", "s0", 1, 0.3), rec("f", "s1", 0, 0.1),
    };
    FrocCurve curve = froc(records, 2);
    REQUIRE(curve.points.size() == 5);
    // thresholds descending: 0.9, 0.8, 0.7, 0.3, 0.1
    CHECK(curve.points[0].fp_per_scan == 0.0);
    CHECK(curve.points[0].sensitivity == doctest::Approx(1.0 / 3.0));
    CHECK(curve.points[1].fp_per_scan == 0.5);
    CHECK(curve.points[1].sensitivity == doctest::Approx(1.0 / 3.0));
    CHECK(curve.points[2].fp_per_scan == 0.5);
    CHECK(curve.points[2].sensitivity == doctest::Approx(2.0 / 3.0));
    CHECK(curve.points[3].fp_per_scan == 1.0);
    CHECK(curve.points[3].sensitivity == 1.0);
    CHECK(curve.points[4].fp_per_scan == 1.5);
    CHECK(curve.points[4].sensitivity == 1.0);

    CHECK(froc_oracle::brute_force(records, 2).points == curve.points);
}

TEST_CASE("froc equals the brute-force oracle on random record lists") {
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<ScoreRecord> records = random_records(rng, 400, 12);
        const std::size_t n_scans = 1 + rng.uniform_index(12);
        FrocCurve a = froc(records, n_scans);
        FrocCurve b = froc_oracle::brute_force(records, n_scans);
        REQUIRE(a.points.size() == b.points.size());
        CHECK(a.points == b.points);
        CHECK(a.n_positives == b.n_positives);

        // monotonicity along the curve
        for (std::size_t i = 1; i < a.points.size(); ++i) {
            CHECK(a.points[i].fp_per_scan >= a.points[i - 1].fp_per_scan);
            CHECK(a.points[i].sensitivity >= a.points[i - 1].sensitivity);
        }
    }
}

TEST_CASE("rejected records never count as true positives above threshold zero") {
    std::vector<ScoreRecord> records = {
        rec("p0", "s0", 1, 0.9),
        rec("p1", "s0", 1, 0.8, 1),  // rejected at stage 1 -> score 0
        rec("p2", "s1", 1, 0.6),
        rec("n0", "s1", 0, 0.0),
    };
    FrocCurve curve = froc(records, 2);
    for (const auto& pt : curve.points)
        if (pt.threshold > 0.0) CHECK(pt.tp <= 2);
    // the final scorer ranks all surviving positives above 0, so the maximum
    // sensitivity below threshold 0 is 1 - rejected/total
    double best_above_zero = 0.0;
    for (const auto& pt : curve.points)
        if (pt.threshold > 0.0) best_above_zero = std::max(best_above_zero, pt.sensitivity);
    CHECK(best_above_zero == doctest::Approx(1.0 - 1.0 / 3.0));
}

TEST_CASE("froc input validation") {
    std::vector<ScoreRecord> no_positives = {rec("n", "s0", 0, 0.3)};
    CHECK_THROWS_AS(froc(no_positives, 1), EvalError);

    std::vector<ScoreRecord> bad = {rec("p", "s0", 1, 0.5)};
    bad[0].rejected_at = 0;
    bad[0].score = 0.4;  // violates the rejected => score 0 invariant
    CHECK_THROWS_AS(froc(bad, 1), EvalError);
}

TEST_CASE("sensitivity_at is a step function over observed points") {
    FrocCurve curve;
    curve.n_scans = 4;
    curve.n_positives = 10;
    curve.points = {FrocPoint{0.9, 3, 2, 0.3, 0.5}, FrocPoint{0.5, 6, 8, 0.6, 2.0},
                    FrocPoint{0.2, 9, 20, 0.9, 5.0}};
    CHECK(sensitivity_at(curve, 0.25) == 0.0);     // below the first point
    CHECK(sensitivity_at(curve, 0.5) == 0.3);
    CHECK(sensitivity_at(curve, 1.0) == 0.3);      // between points: lower one
    CHECK(sensitivity_at(curve, 2.0) == 0.6);
    CHECK(sensitivity_at(curve, 100.0) == 0.9);    // beyond the last point
    CHECK_THROWS_AS(sensitivity_at(curve, -1.0), EvalError);
}

TEST_CASE("histogram: edges, inclusivity, and validation") {
    Histogram empty = histogram({}, 4);
    CHECK(empty.total() == 0);
    REQUIRE(empty.counts.size() == 4);

    Histogram two = histogram({0.0, 1.0}, 2);
    CHECK(two.counts[0] == 1);
    CHECK(two.counts[1] == 1);  // right edge of the last bin is inclusive

    CHECK_THROWS_AS(histogram({1.5}, 2), DataError);
    CHECK_THROWS_AS(histogram({-0.1}, 2), DataError);
    CHECK_THROWS_AS(histogram({0.5}, 0), ConfigError);
}

TEST_CASE("histogram of seeded uniforms is flat to within sampling noise") {
    Rng rng(99);
    std::vector<double> scores(10000);
    for (auto& s : scores) s = rng.uniform();
    Histogram h = histogram(scores, 10);
    CHECK(h.total() == 10000);
    for (std::size_t c : h.counts) {
        CHECK(c >= 850);
        CHECK(c <= 1150);
    }

    // permutation invariance
    std::vector<double> shuffled = scores;
    rng.shuffle(shuffled);
    CHECK(histogram(shuffled, 10).counts == h.counts);
}

TEST_CASE("stage_table_csv layout") {
    CHECK(stage_table_csv({}) ==
          "stage,non_nodules_before,non_nodules_after,nodules_before,nodules_after,"
          "sigma,threshold\n");

    // stage-1 row shaped like the published cascade table
    StageStats s1;
    s1.n_non_nodule_before = 551062;
    s1.n_non_nodule_after = 188966;
    s1.n_nodule_before = 1348;
    s1.n_nodule_after = 1344;
    s1.sigma = 0.4;
    s1.threshold = 0.1;
    const std::string csv = stage_table_csv({s1});
    CHECK(csv.find("1,551062,188966,1348,1344,0.4,0.1") != std::string::npos);
}
