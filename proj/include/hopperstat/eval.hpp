#ifndef HOPPERSTAT_EVAL_HPP
#define HOPPERSTAT_EVAL_HPP

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hopperstat/classifier.hpp"
#include "hopperstat/codec.hpp"
#include "hopperstat/errors.hpp"
#include "hopperstat/stats.hpp"
#include "hopperstat/synth.hpp"

namespace hopperstat {

/// One fully analyzed frame.
struct FrameResult {
    ScoreVector scores;
    double sigma_l1 = 0.0;
    double adjusted_score = 0.0;
    FullnessClass predicted = FullnessClass::P10;
};

/// Decode + sample + score + classify, on the model's recorded lines.
inline FrameResult analyze_frame(const GrayImage& img, const CalibrationModel& model) {
    try {
        const LineStats s1 = line_stats(sample_line(img, model.line_l1));
        const LineStats s2 = line_stats(sample_line(img, model.line_l2));
        FrameResult r;
        r.scores = combine_scores(s1, s2);
        r.sigma_l1 = s1.sigma;
        r.adjusted_score =
            apply_baseline(driving_score(r.scores, model.score_kind), model.baseline_l2);
        r.predicted = classify(r.scores, r.sigma_l1, model);
        return r;
    } catch (const OutOfBounds& e) {
        throw LineOutOfBounds(e.what());
    }
}

/// Accuracy and latency report over a labeled corpus.
struct EvalReport {
    std::size_t total = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    std::array<std::array<std::size_t, 5>, 5> confusion{}; // [truth][predicted]
    std::vector<std::string> excluded_files;
    double mean_latency = 0.0;                 // seconds per frame
    std::vector<double> per_image_latencies;   // seconds

    std::size_t excluded() const noexcept { return excluded_files.size(); }
};

/// Runs the R/T protocol: every non-excluded frame is decoded, sampled on
/// the model's recorded lines, scored, classified, and compared to truth.
/// A class-adjacent miss counts fully wrong. Per-frame wall-clock latency
/// covers decode through classify; one warm-up frame runs untimed first.
inline EvalReport evaluate(const CalibrationModel& model,
                           const std::string& manifest_path,
                           const std::vector<ManifestEntry>& manifest,
                           const std::vector<std::string>& exclusions = {}) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(manifest_path).parent_path();

    std::set<std::string> excluded(exclusions.begin(), exclusions.end());
    for (const auto& name : excluded) {
        const bool known = std::any_of(manifest.begin(), manifest.end(),
                                       [&](const ManifestEntry& e) { return e.file == name; });
        if (!known)
            throw MalformedManifest("exclusion '" + name + "' is not in the manifest");
    }

    EvalReport report;
    auto resolve = [&](const ManifestEntry& e) {
        const std::string path = (dir / e.file).string();
        if (!fs::exists(path)) throw MissingImage("manifest entry '" + e.file + "' not found");
        return path;
    };

    using clock = std::chrono::steady_clock;
    bool warmed_up = false;
    for (const auto& entry : manifest) {
        if (excluded.count(entry.file)) {
            report.excluded_files.push_back(entry.file);
            continue;
        }
        const std::string path = resolve(entry);

        if (!warmed_up) {
            analyze_frame(decode_file(path), model);
            warmed_up = true;
        }

        const auto start = clock::now();
        const FrameResult r = analyze_frame(decode_file(path), model);
        const auto stop = clock::now();
        report.per_image_latencies.push_back(
            std::chrono::duration<double>(stop - start).count());

        ++report.total;
        ++report.confusion[static_cast<int>(entry.truth)][static_cast<int>(r.predicted)];
        if (r.predicted == entry.truth) ++report.correct;
    }

    report.accuracy = report.total == 0
                          ? 0.0
                          : static_cast<double>(report.correct) / static_cast<double>(report.total);
    report.mean_latency =
        report.per_image_latencies.empty()
            ? 0.0
            : std::accumulate(report.per_image_latencies.begin(),
                              report.per_image_latencies.end(), 0.0) /
                  static_cast<double>(report.per_image_latencies.size());
    return report;
}

/// Per-frame and mean wall-clock seconds for decode + sample + score +
/// classify, measured sequentially after one untimed warm-up frame.
inline std::pair<std::vector<double>, double> measure_latency(
    const CalibrationModel& model, const std::string& manifest_path,
    const std::vector<ManifestEntry>& manifest) {
    if (manifest.empty()) throw InvalidParams("corpus is empty");
    const EvalReport r = evaluate(model, manifest_path, manifest);
    return {r.per_image_latencies, r.mean_latency};
}

inline nlohmann::json report_json(const EvalReport& r) {
    nlohmann::json confusion = nlohmann::json::array();
    for (const auto& row : r.confusion) confusion.push_back(row);
    return nlohmann::json{{"total", r.total},
                          {"correct", r.correct},
                          {"accuracy", r.accuracy},
                          {"confusion", confusion},
                          {"excluded", {{"count", r.excluded()}, {"files", r.excluded_files}}},
                          {"mean_latency", r.mean_latency},
                          {"per_image_latencies", r.per_image_latencies}};
}

inline EvalReport report_from_json(const nlohmann::json& j) {
    try {
        EvalReport r;
        r.total = j.at("total").get<std::size_t>();
        r.correct = j.at("correct").get<std::size_t>();
        r.accuracy = j.at("accuracy").get<double>();
        const auto& conf = j.at("confusion");
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t k = 0; k < 5; ++k)
                r.confusion[i][k] = conf.at(i).at(k).get<std::size_t>();
        r.excluded_files = j.at("excluded").at("files").get<std::vector<std::string>>();
        r.mean_latency = j.at("mean_latency").get<double>();
        r.per_image_latencies = j.at("per_image_latencies").get<std::vector<double>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedManifest(std::string("report: ") + e.what());
    }
}

inline std::string render_report_text(const EvalReport& r) {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "accuracy: %.2f%% (%zu/%zu)\n", r.accuracy * 100.0,
                  r.correct, r.total);
    os << buf;
    std::snprintf(buf, sizeof(buf), "mean latency: %.6f s/frame over %zu frames\n",
                  r.mean_latency, r.per_image_latencies.size());
    os << buf;
    os << "excluded: " << r.excluded() << "\n";
    os << "confusion (rows = truth, cols = predicted):\n";
    os << "        ";
    for (auto c : kAllClasses) {
        std::snprintf(buf, sizeof(buf), "%6s", class_name(c));
        os << buf;
    }
    os << "\n";
    for (auto t : kAllClasses) {
        std::snprintf(buf, sizeof(buf), "%6s  ", class_name(t));
        os << buf;
        for (auto p : kAllClasses) {
            std::snprintf(buf, sizeof(buf), "%6zu",
                          r.confusion[static_cast<int>(t)][static_cast<int>(p)]);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace hopperstat

#endif // HOPPERSTAT_EVAL_HPP
