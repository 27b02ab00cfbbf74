#ifndef HOPPERSTAT_CLASSIFIER_HPP
#define HOPPERSTAT_CLASSIFIER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hopperstat/errors.hpp"
#include "hopperstat/image.hpp"
#include "hopperstat/stats.hpp"

namespace hopperstat {

/// The five nominal fill levels, totally ordered.
enum class FullnessClass : int { P10 = 0, P25 = 1, P50 = 2, P75 = 3, P100 = 4 };

constexpr std::array<FullnessClass, 5> kAllClasses = {
    FullnessClass::P10, FullnessClass::P25, FullnessClass::P50,
    FullnessClass::P75, FullnessClass::P100};

constexpr std::array<double, 5> kNominalFill = {0.10, 0.25, 0.50, 0.75, 1.00};

inline const char* class_name(FullnessClass c) {
    switch (c) {
        case FullnessClass::P10: return "P10";
        case FullnessClass::P25: return "P25";
        case FullnessClass::P50: return "P50";
        case FullnessClass::P75: return "P75";
        case FullnessClass::P100: return "P100";
    }
    return "?";
}

inline std::optional<FullnessClass> class_from_name(const std::string& s) {
    for (auto c : kAllClasses)
        if (s == class_name(c)) return c;
    return std::nullopt;
}

/// Which ScoreVector field drives classification.
enum class ScoreKind { A1, A1_SQ, A2 };

inline const char* score_kind_name(ScoreKind k) {
    switch (k) {
        case ScoreKind::A1: return "A1";
        case ScoreKind::A1_SQ: return "A1_SQ";
        case ScoreKind::A2: return "A2";
    }
    return "?";
}

inline std::optional<ScoreKind> score_kind_from_name(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (s == "A1") return ScoreKind::A1;
    if (s == "A1_SQ") return ScoreKind::A1_SQ;
    if (s == "A2") return ScoreKind::A2;
    return std::nullopt;
}

inline double driving_score(const ScoreVector& sv, ScoreKind k) {
    switch (k) {
        case ScoreKind::A1: return sv.a1;
        case ScoreKind::A1_SQ: return sv.a1_sq;
        case ScoreKind::A2: return sv.a2;
    }
    return sv.a2;
}

/// Empty-hopper subtraction, clamped at zero.
inline double apply_baseline(double raw, double baseline) {
    return std::max(0.0, raw - baseline);
}

/// Calibration input: one scored frame with its ground-truth class.
struct LabeledScore {
    ScoreVector score_vector;
    double sigma_l1 = 0.0;
    FullnessClass truth = FullnessClass::P10;
};

/// Calibrated thresholds plus the line geometry they were derived with.
struct CalibrationModel {
    ScoreKind score_kind = ScoreKind::A2;
    double baseline_l1 = 0.0;
    double baseline_l2 = 0.0;
    double t1 = 0.0, t2 = 0.0, t3 = 0.0; // adjusted-score class boundaries, strictly increasing
    double l1_gate = 0.0;                // adjusted sigma(L1) threshold splitting P75 | P100
    LineSpec line_l1;
    LineSpec line_l2;

    void validate() const {
        if (!(t1 < t2 && t2 < t3))
            throw MalformedModel("thresholds must be strictly increasing, got [" +
                                 std::to_string(t1) + ", " + std::to_string(t2) + ", " +
                                 std::to_string(t3) + "]");
        if (l1_gate < 0.0) throw MalformedModel("l1_gate must be >= 0");
        if (baseline_l1 < 0.0 || baseline_l2 < 0.0)
            throw MalformedModel("baselines must be >= 0");
    }
};

/// Midpoint calibration: class thresholds are midpoints of consecutive
/// adjusted class-mean scores for P10, P25, P50, merged(P75,P100); the
/// L1 gate is the midpoint of the P75 and P100 mean adjusted sigma(L1).
inline CalibrationModel calibrate(const std::vector<LabeledScore>& examples,
                                  ScoreKind score_kind,
                                  double baseline_l1,
                                  double baseline_l2,
                                  const LineSpec& line_l1 = {},
                                  const LineSpec& line_l2 = {}) {
    std::array<double, 5> sum{};
    std::array<std::size_t, 5> n{};
    double gate_sum_75 = 0.0, gate_sum_100 = 0.0;

    for (const auto& ex : examples) {
        const int i = static_cast<int>(ex.truth);
        sum[i] += apply_baseline(driving_score(ex.score_vector, score_kind), baseline_l2);
        ++n[i];
        const double g = apply_baseline(ex.sigma_l1, baseline_l1);
        if (ex.truth == FullnessClass::P75) gate_sum_75 += g;
        if (ex.truth == FullnessClass::P100) gate_sum_100 += g;
    }

    for (auto c : kAllClasses)
        if (n[static_cast<int>(c)] == 0)
            throw MissingClass(std::string(class_name(c)) + " has no calibration examples");

    // Means for P10, P25, P50, then P75 and P100 pooled into one region.
    const double m10 = sum[0] / n[0];
    const double m25 = sum[1] / n[1];
    const double m50 = sum[2] / n[2];
    const double m_top = (sum[3] + sum[4]) / static_cast<double>(n[3] + n[4]);

    const std::array<std::pair<const char*, double>, 4> means = {
        std::pair{"P10", m10}, {"P25", m25}, {"P50", m50}, {"P75/P100", m_top}};
    for (std::size_t i = 1; i < means.size(); ++i)
        if (!(means[i - 1].second < means[i].second))
            throw NonMonotoneClasses(std::string(means[i - 1].first) + " mean " +
                                     std::to_string(means[i - 1].second) +
                                     " is not below " + means[i].first + " mean " +
                                     std::to_string(means[i].second));

    const double g75 = gate_sum_75 / n[3];
    const double g100 = gate_sum_100 / n[4];
    if (std::abs(g100 - g75) <= 1e-12)
        throw DegenerateGate("P75 and P100 mean sigma(L1) coincide at " + std::to_string(g75));

    CalibrationModel m;
    m.score_kind = score_kind;
    m.baseline_l1 = baseline_l1;
    m.baseline_l2 = baseline_l2;
    m.t1 = (m10 + m25) / 2.0;
    m.t2 = (m25 + m50) / 2.0;
    m.t3 = (m50 + m_top) / 2.0;
    m.l1_gate = (g75 + g100) / 2.0;
    m.line_l1 = line_l1;
    m.line_l2 = line_l2;
    m.validate();
    return m;
}

/// Maps a score vector to a fullness class. Ties at thresholds resolve
/// upward; the L1 gate splits P75 from P100 above t3.
inline FullnessClass classify(const ScoreVector& score, double sigma_l1,
                              const CalibrationModel& model) {
    const double s = apply_baseline(driving_score(score, model.score_kind), model.baseline_l2);
    if (s < model.t1) return FullnessClass::P10;
    if (s < model.t2) return FullnessClass::P25;
    if (s < model.t3) return FullnessClass::P50;
    const double g = apply_baseline(sigma_l1, model.baseline_l1);
    return g >= model.l1_gate ? FullnessClass::P100 : FullnessClass::P75;
}

// --- Model document (JSON, version 1). Unknown fields are rejected. ---

inline nlohmann::json save_model(const CalibrationModel& m) {
    m.validate();
    return nlohmann::json{
        {"score_kind", score_kind_name(m.score_kind)},
        {"baseline_l1", m.baseline_l1},
        {"baseline_l2", m.baseline_l2},
        {"thresholds", {m.t1, m.t2, m.t3}},
        {"l1_gate", m.l1_gate},
        {"lines",
         {{"L1", {m.line_l1.x0, m.line_l1.y0, m.line_l1.x1, m.line_l1.y1}},
          {"L2", {m.line_l2.x0, m.line_l2.y0, m.line_l2.x1, m.line_l2.y1}}}},
        {"version", 1}};
}

inline CalibrationModel load_model(const nlohmann::json& doc) {
    if (!doc.is_object()) throw MalformedModel("model document must be a JSON object");

    static const std::set<std::string> allowed = {
        "score_kind", "baseline_l1", "baseline_l2", "thresholds", "l1_gate", "lines", "version"};
    for (const auto& [key, _] : doc.items())
        if (!allowed.count(key)) throw MalformedModel("unknown field '" + key + "'");
    for (const auto& key : allowed)
        if (!doc.contains(key)) throw MalformedModel("missing field '" + key + "'");

    try {
        if (doc.at("version").get<int>() != 1)
            throw MalformedModel("unsupported version " + doc.at("version").dump());

        CalibrationModel m;
        const auto kind = score_kind_from_name(doc.at("score_kind").get<std::string>());
        if (!kind)
            throw MalformedModel("unknown score_kind " + doc.at("score_kind").dump());
        m.score_kind = *kind;
        m.baseline_l1 = doc.at("baseline_l1").get<double>();
        m.baseline_l2 = doc.at("baseline_l2").get<double>();

        const auto& th = doc.at("thresholds");
        if (!th.is_array() || th.size() != 3)
            throw MalformedModel("thresholds must be an array of 3 numbers");
        m.t1 = th[0].get<double>();
        m.t2 = th[1].get<double>();
        m.t3 = th[2].get<double>();
        m.l1_gate = doc.at("l1_gate").get<double>();

        const auto& lines = doc.at("lines");
        if (!lines.is_object() || !lines.contains("L1") || !lines.contains("L2") ||
            lines.size() != 2)
            throw MalformedModel("lines must hold exactly L1 and L2");
        auto read_line = [&](const char* name) {
            const auto& a = lines.at(name);
            if (!a.is_array() || a.size() != 4)
                throw MalformedModel(std::string(name) + " must be [x0,y0,x1,y1]");
            return LineSpec{name, a[0].get<int>(), a[1].get<int>(), a[2].get<int>(),
                            a[3].get<int>()};
        };
        m.line_l1 = read_line("L1");
        m.line_l2 = read_line("L2");
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedModel(e.what());
    }
}

} // namespace hopperstat

#endif // HOPPERSTAT_CLASSIFIER_HPP
