#include "cascnn/report.hpp"

#include <fstream>
#include <sstream>

#include "cascnn/errors.hpp"
#include "cascnn/serialize_json.hpp"

namespace cascnn {

using nlohmann::json;

RunReport build_report(std::string label, json config_snapshot,
                       std::vector<StageStats> stage_table, std::vector<ScoreRecord> records,
                       std::size_t n_scans) {
    RunReport report;
    report.label = std::move(label);
    report.config = std::move(config_snapshot);
    report.stage_table = std::move(stage_table);
    report.n_scans = n_scans;
    report.n_records = records.size();

    report.curve = froc(records, n_scans);
    report.sensitivity_at_1 = sensitivity_at(report.curve, 1.0);
    report.sensitivity_at_4 = sensitivity_at(report.curve, 4.0);

    std::vector<double> nodule_scores, non_nodule_scores;
    for (const auto& r : records) {
        if (r.label == 1) {
            if (r.rejected()) ++report.rejected_positives;
            nodule_scores.push_back(r.score);
        } else {
            non_nodule_scores.push_back(r.score);
        }
    }
    report.nodule_hist = histogram(nodule_scores, 20);
    report.non_nodule_hist = histogram(non_nodule_scores, 20);
    report.records = std::move(records);
    return report;
}

namespace {

json histogram_to_json(const Histogram& h) {
    return json{{"bin_edges", h.bin_edges}, {"counts", h.counts}};
}

Histogram histogram_from_json(const json& j) {
    Histogram h;
    h.bin_edges = j.at("bin_edges").get<std::vector<double>>();
    h.counts = j.at("counts").get<std::vector<std::size_t>>();
    return h;
}

}  // namespace

json report_to_json(const RunReport& report) {
    json j{{"label", report.label},
           {"config", report.config},
           {"stage_table", report.stage_table},
           {"froc", report.curve},
           {"sensitivity_at_1", report.sensitivity_at_1},
           {"sensitivity_at_4", report.sensitivity_at_4},
           {"rejected_positives", report.rejected_positives},
           {"n_scans", report.n_scans},
           {"n_records", report.n_records},
           {"baseline", report.baseline},
           {"in_sample", report.in_sample},
           {"nodule_histogram", histogram_to_json(report.nodule_hist)},
           {"non_nodule_histogram", histogram_to_json(report.non_nodule_hist)},
           {"warnings", report.warnings},
           {"records", report.records}};
    if (report.hygiene_violations)
        j["hygiene_violations"] = *report.hygiene_violations;
    return j;
}

RunReport report_from_json(const json& j) {
    RunReport report;
    report.label = j.at("label").get<std::string>();
    report.config = j.at("config");
    report.stage_table = j.at("stage_table").get<std::vector<StageStats>>();
    report.curve = j.at("froc").get<FrocCurve>();
    report.sensitivity_at_1 = j.at("sensitivity_at_1").get<double>();
    report.sensitivity_at_4 = j.at("sensitivity_at_4").get<double>();
    report.rejected_positives = j.at("rejected_positives").get<std::size_t>();
    report.n_scans = j.at("n_scans").get<std::size_t>();
    report.n_records = j.at("n_records").get<std::size_t>();
    report.baseline = j.at("baseline").get<bool>();
    report.in_sample = j.at("in_sample").get<bool>();
    report.nodule_hist = histogram_from_json(j.at("nodule_histogram"));
    report.non_nodule_hist = histogram_from_json(j.at("non_nodule_histogram"));
    report.warnings = j.value("warnings", std::vector<std::string>{});
    if (j.contains("hygiene_violations"))
        report.hygiene_violations = j["hygiene_violations"].get<std::size_t>();
    report.records = j.at("records").get<std::vector<ScoreRecord>>();
    return report;
}

void save_report(const RunReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << report_to_json(report).dump(2) << "\n";
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

RunReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    try {
        return report_from_json(j);
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

RunComparison compare_runs(const std::vector<RunReport>& reports) {
    if (reports.empty()) throw EvalError("compare_runs: no reports");
    RunComparison cmp;
    for (const auto& r : reports) {
        cmp.labels.push_back(r.label);
        cmp.curves.push_back(r.curve);
        cmp.sensitivities.emplace_back(sensitivity_at(r.curve, 1.0),
                                       sensitivity_at(r.curve, 4.0));
    }
    return cmp;
}

std::string froc_csv(const RunComparison& comparison) {
    std::ostringstream out;
    out << "label,threshold,tp,fp,sensitivity,fp_per_scan\n";
    out.precision(17);
    for (std::size_t i = 0; i < comparison.curves.size(); ++i)
        for (const auto& pt : comparison.curves[i].points)
            out << comparison.labels[i] << ',' << pt.threshold << ',' << pt.tp << ',' << pt.fp
                << ',' << pt.sensitivity << ',' << pt.fp_per_scan << '\n';
    return out.str();
}

std::string summary_csv(const RunComparison& comparison) {
    std::ostringstream out;
    out << "label,sensitivity_at_1,sensitivity_at_4\n";
    out.precision(17);
    for (std::size_t i = 0; i < comparison.labels.size(); ++i)
        out << comparison.labels[i] << ',' << comparison.sensitivities[i].first << ','
            << comparison.sensitivities[i].second << '\n';
    return out.str();
}

}  // namespace cascnn
