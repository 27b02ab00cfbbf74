#ifndef HOPPERSTAT_CONFIG_HPP
#define HOPPERSTAT_CONFIG_HPP

#include <cmath>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "hopperstat/classifier.hpp"
#include "hopperstat/errors.hpp"
#include "hopperstat/image.hpp"

namespace hopperstat {

/// Line geometry plus score choice for analysis. Lines may be left unset,
/// in which case per-image defaults apply: L2 is the center-column vertical
/// segment over rows [0.1h, 0.95h]; L1 is horizontal at row 0.2h over
/// columns [0.25w, 0.75w].
struct LineConfig {
    std::optional<LineSpec> l1;
    std::optional<LineSpec> l2;
    ScoreKind score_kind = ScoreKind::A2;

    LineSpec l1_for(const GrayImage& img) const { return l1 ? *l1 : default_l1(img); }
    LineSpec l2_for(const GrayImage& img) const { return l2 ? *l2 : default_l2(img); }

    static LineSpec default_l1(const GrayImage& img) {
        const int y = static_cast<int>(std::lround(0.2 * img.height()));
        const int x0 = static_cast<int>(std::lround(0.25 * img.width()));
        const int x1 = static_cast<int>(std::lround(0.75 * img.width()));
        return LineSpec{"L1", x0, y, x1, y};
    }

    static LineSpec default_l2(const GrayImage& img) {
        const int x = img.width() / 2;
        const int y0 = static_cast<int>(std::lround(0.10 * img.height()));
        const int y1 = static_cast<int>(std::lround(0.95 * img.height()));
        return LineSpec{"L2", x, y0, x, y1};
    }
};

/// Config document: {"lines": {"L1": [x0,y0,x1,y1], "L2": [...]},
/// "score_kind": "A1"|"A1_SQ"|"A2"}. Every field is optional; unknown
/// fields are rejected.
inline LineConfig load_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw MalformedConfig("config must be a JSON object");

    static const std::set<std::string> allowed = {"lines", "score_kind"};
    for (const auto& [key, _] : doc.items())
        if (!allowed.count(key)) throw MalformedConfig("unknown field '" + key + "'");

    LineConfig cfg;
    try {
        if (doc.contains("score_kind")) {
            const auto kind = score_kind_from_name(doc.at("score_kind").get<std::string>());
            if (!kind)
                throw MalformedConfig("unknown score_kind " + doc.at("score_kind").dump());
            cfg.score_kind = *kind;
        }
        if (doc.contains("lines")) {
            const auto& lines = doc.at("lines");
            if (!lines.is_object()) throw MalformedConfig("lines must be an object");
            for (const auto& [key, val] : lines.items()) {
                if (key != "L1" && key != "L2")
                    throw MalformedConfig("unknown line '" + key + "'");
                if (!val.is_array() || val.size() != 4)
                    throw MalformedConfig(key + " must be [x0,y0,x1,y1]");
                LineSpec s{key, val[0].get<int>(), val[1].get<int>(), val[2].get<int>(),
                           val[3].get<int>()};
                (key == "L1" ? cfg.l1 : cfg.l2) = s;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedConfig(e.what());
    }
    return cfg;
}

inline nlohmann::json save_config(const LineConfig& cfg) {
    nlohmann::json doc{{"score_kind", score_kind_name(cfg.score_kind)}};
    nlohmann::json lines = nlohmann::json::object();
    if (cfg.l1) lines["L1"] = {cfg.l1->x0, cfg.l1->y0, cfg.l1->x1, cfg.l1->y1};
    if (cfg.l2) lines["L2"] = {cfg.l2->x0, cfg.l2->y0, cfg.l2->x1, cfg.l2->y1};
    if (!lines.empty()) doc["lines"] = lines;
    return doc;
}

} // namespace hopperstat

#endif // HOPPERSTAT_CONFIG_HPP
