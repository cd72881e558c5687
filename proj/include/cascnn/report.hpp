#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascnn/eval.hpp"
#include "cascnn/records.hpp"

namespace cascnn {

/// Everything a run leaves behind. The stored ScoreRecords are the ground
/// truth: every derived number (curve, sensitivities, rejection counts) can
/// be recomputed from them, so reports are self-contained and comparable
/// without the model or dataset. No timestamps: identical runs produce
/// identical bytes.
struct RunReport {
    std::string label;
    nlohmann::json config;                 // cascade config snapshot
    std::vector<StageStats> stage_table;   // counts summed over folds
    FrocCurve curve;
    double sensitivity_at_1 = 0.0;
    double sensitivity_at_4 = 0.0;
    std::size_t rejected_positives = 0;    // false negatives caused by stage filters
    std::size_t n_scans = 0;
    std::size_t n_records = 0;
    bool baseline = false;                 // zero-stage model
    bool in_sample = false;                // evaluated data overlaps the training data
    Histogram nodule_hist;                 // final score histograms, 20 bins
    Histogram non_nodule_hist;
    std::vector<std::string> warnings;
    std::optional<std::size_t> hygiene_violations;  // set by instrumented runs
    std::vector<ScoreRecord> records;
};

/// Derives the curve, operating-point sensitivities, rejection counts and
/// histograms from the records.
RunReport build_report(std::string label, nlohmann::json config_snapshot,
                       std::vector<StageStats> stage_table, std::vector<ScoreRecord> records,
                       std::size_t n_scans);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

void save_report(const RunReport& report, const std::string& path);
RunReport load_report(const std::string& path);

/// A labeled batch of runs prepared for plotting and tabulation.
struct RunComparison {
    std::vector<std::string> labels;
    std::vector<FrocCurve> curves;
    // per run: {sensitivity at 1 FP/scan, sensitivity at 4 FP/scan}
    std::vector<std::pair<double, double>> sensitivities;
};

RunComparison compare_runs(const std::vector<RunReport>& reports);

/// froc.csv rows: label,threshold,tp,fp,sensitivity,fp_per_scan.
std::string froc_csv(const RunComparison& comparison);

/// Two-operating-point summary table (CSV): label,sensitivity_at_1,sensitivity_at_4.
std::string summary_csv(const RunComparison& comparison);

}  // namespace cascnn
