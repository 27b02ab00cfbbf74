// hopperstat: scan-line fill-level estimation for industrial hoppers.
//
// Subcommands: analyze, calibrate, evaluate, synth, watch.
// Exit codes: 0 success, 2 I/O failure, 3 malformed model/config,
// 4 calibration failure.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hopperstat/classifier.hpp"
#include "hopperstat/codec.hpp"
#include "hopperstat/config.hpp"
#include "hopperstat/eval.hpp"
#include "hopperstat/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hopperstat;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitMalformed = 3;
constexpr int kExitCalibration = 4;

std::string rfc3339_utc_now() {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
    const std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms.count()));
    return buf;
}

json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoFailure(std::string("cannot open ") + what + " '" + path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw MalformedModel(std::string(what) + " '" + path + "' is not valid JSON");
    return doc;
}

CalibrationModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open model '" + path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw MalformedModel("model '" + path + "' is not valid JSON");
    return load_model(doc);
}

LineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config '" + path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw MalformedConfig("config '" + path + "' is not valid JSON");
    return load_config(doc);
}

// Model lines are the recorded calibration geometry; a config overrides
// them (falling back to per-image defaults for lines it leaves unset).
CalibrationModel model_for_image(const CalibrationModel& model, const LineConfig* cfg,
                                 const GrayImage& img) {
    if (!cfg) return model;
    CalibrationModel m = model;
    m.line_l1 = cfg->l1_for(img);
    m.line_l2 = cfg->l2_for(img);
    return m;
}

json analysis_record(const std::string& file, const FrameResult& r) {
    return json{{"file", file},
                {"class", class_name(r.predicted)},
                {"sigma1", r.scores.sigma1},
                {"sigma2", r.scores.sigma2},
                {"a1", r.scores.a1},
                {"a1_sq", r.scores.a1_sq},
                {"a2", r.scores.a2},
                {"adjusted_score", r.adjusted_score},
                {"timestamp", rfc3339_utc_now()}};
}

int cmd_analyze(const std::string& model_path, const std::string& config_path,
                const std::vector<std::string>& images) {
    const CalibrationModel model = load_model_file(model_path);
    LineConfig cfg;
    const bool have_cfg = !config_path.empty();
    if (have_cfg) cfg = load_config_file(config_path);

    for (const auto& path : images) {
        const GrayImage img = decode_file(path);
        const CalibrationModel m = model_for_image(model, have_cfg ? &cfg : nullptr, img);
        std::cout << analysis_record(path, analyze_frame(img, m)).dump() << "\n";
    }
    std::cout.flush();
    return 0;
}

int cmd_calibrate(const std::string& manifest_path, const std::string& config_path,
                  const std::string& score_kind_str, const std::string& baseline_path,
                  const std::string& out_path) {
    LineConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    ScoreKind kind = cfg.score_kind;
    if (!score_kind_str.empty()) {
        const auto k = score_kind_from_name(score_kind_str);
        if (!k) throw MalformedConfig("unknown score kind '" + score_kind_str + "'");
        kind = *k;
    }

    const auto manifest = load_manifest(manifest_path);
    if (manifest.empty()) throw IoFailure("empty corpus in '" + manifest_path + "'");
    const fs::path dir = fs::path(manifest_path).parent_path();

    // Line geometry is frozen from the first frame's dimensions.
    const GrayImage first = decode_file((dir / manifest.front().file).string());
    const LineSpec l1 = cfg.l1_for(first);
    const LineSpec l2 = cfg.l2_for(first);

    double baseline_l1 = 0.0, baseline_l2 = 0.0;
    if (!baseline_path.empty()) {
        const GrayImage empty = decode_file(baseline_path);
        const LineStats s1 = line_stats(sample_line(empty, l1));
        const LineStats s2 = line_stats(sample_line(empty, l2));
        baseline_l1 = s1.sigma;
        baseline_l2 = driving_score(combine_scores(s1, s2), kind);
    }

    std::vector<LabeledScore> labeled;
    labeled.reserve(manifest.size());
    for (const auto& entry : manifest) {
        const std::string path = (dir / entry.file).string();
        if (!fs::exists(path)) throw MissingImage("manifest entry '" + entry.file + "' not found");
        const GrayImage img = decode_file(path);
        const LineStats s1 = line_stats(sample_line(img, l1));
        const LineStats s2 = line_stats(sample_line(img, l2));
        labeled.push_back(LabeledScore{combine_scores(s1, s2), s1.sigma, entry.truth});
    }

    const CalibrationModel model = calibrate(labeled, kind, baseline_l1, baseline_l2, l1, l2);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw IoFailure("cannot write model '" + out_path + "'");
    out << save_model(model).dump(2) << "\n";
    if (!out.flush()) throw IoFailure("write error on '" + out_path + "'");
    std::cerr << "wrote " << out_path << " (thresholds " << model.t1 << ", " << model.t2 << ", "
              << model.t3 << "; l1_gate " << model.l1_gate << ")\n";
    return 0;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& model_path,
                 const std::vector<std::string>& exclusions, const std::string& out_base) {
    const CalibrationModel model = load_model_file(model_path);
    const auto manifest = load_manifest(manifest_path);
    if (manifest.empty()) throw IoFailure("empty corpus in '" + manifest_path + "'");

    const EvalReport report = evaluate(model, manifest_path, manifest, exclusions);
    const std::string text = render_report_text(report);
    std::cout << text;

    if (!out_base.empty()) {
        std::ofstream jf(out_base + ".json", std::ios::trunc);
        if (!jf) throw IoFailure("cannot write '" + out_base + ".json'");
        jf << report_json(report).dump(2) << "\n";
        std::ofstream tf(out_base + ".txt", std::ios::trunc);
        if (!tf) throw IoFailure("cannot write '" + out_base + ".txt'");
        tf << text;
        if (!jf.flush() || !tf.flush()) throw IoFailure("write error on report files");
    }
    return 0; // low accuracy is data, not an error
}

int cmd_synth(const CorpusSpec& spec) {
    const auto manifest = generate_corpus(spec);
    std::cerr << "wrote " << manifest.size() << " frames + manifest.jsonl to " << spec.out_dir
              << "\n";
    return 0;
}

std::atomic<bool> g_stop{false};

void handle_sigint(int) { g_stop.store(true); }

int cmd_watch(const std::string& dir, const std::string& model_path,
              const std::string& config_path, int interval_ms) {
    if (!fs::is_directory(dir)) throw IoFailure("'" + dir + "' is not a directory");
    const CalibrationModel model = load_model_file(model_path);
    LineConfig cfg;
    const bool have_cfg = !config_path.empty();
    if (have_cfg) cfg = load_config_file(config_path);

    std::signal(SIGINT, handle_sigint);
    std::signal(SIGTERM, handle_sigint);

    std::map<std::string, std::uintmax_t> pending; // name -> size at last poll
    std::map<std::string, bool> processed;         // exactly-once by name

    while (!g_stop.load()) {
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            names.push_back(entry.path().filename().string());
        }
        std::sort(names.begin(), names.end());

        for (const auto& name : names) {
            if (processed.count(name)) continue;
            std::error_code ec;
            const auto size = fs::file_size(fs::path(dir) / name, ec);
            if (ec) continue;

            auto it = pending.find(name);
            if (it == pending.end() || it->second != size) {
                pending[name] = size; // wait for the size to settle
                continue;
            }

            processed[name] = true;
            pending.erase(name);
            const std::string path = (fs::path(dir) / name).string();
            try {
                const GrayImage img = decode_file(path);
                const CalibrationModel m =
                    model_for_image(model, have_cfg ? &cfg : nullptr, img);
                std::cout << analysis_record(path, analyze_frame(img, m)).dump() << "\n";
            } catch (const Error& e) {
                // one bad frame must not kill the monitor
                std::cout << json{{"file", path}, {"error", e.what()}}.dump() << "\n";
            }
            std::cout.flush();
        }

        std::this_thread::sleep_for(std::chrono::milliseconds(interval_ms));
    }
    std::cout.flush();
    return 0;
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        try {
            out.push_back(std::stod(s.substr(pos, next - pos)));
        } catch (...) {
            throw InvalidParams(std::string("bad ") + what + " list '" + s + "'");
        }
        pos = next + 1;
    }
    if (out.empty()) throw InvalidParams(std::string(what) + " list is empty");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scan-line fill-level estimation for vibrating hoppers"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Classify images, one JSON line each");
    std::string an_model, an_config;
    std::vector<std::string> an_images;
    analyze->add_option("--model", an_model, "Model JSON")->required();
    analyze->add_option("--config", an_config, "Line config JSON");
    analyze->add_option("images", an_images, "Image files (PGM/PNG/JPEG)")->required();

    // calibrate
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit thresholds from a labeled corpus");
    std::string ca_manifest, ca_config, ca_kind, ca_baseline, ca_out;
    calibrate_cmd->add_option("--manifest", ca_manifest, "Corpus manifest (JSONL)")->required();
    calibrate_cmd->add_option("--config", ca_config, "Line config JSON");
    calibrate_cmd->add_option("--score-kind", ca_kind, "a1 | a1_sq | a2");
    calibrate_cmd->add_option("--baseline", ca_baseline, "Empty-hopper image for baselines");
    calibrate_cmd->add_option("-o,--out", ca_out, "Output model path")->required();

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Accuracy + latency over a corpus");
    std::string ev_manifest, ev_model, ev_out;
    std::vector<std::string> ev_exclude;
    evaluate_cmd->add_option("--manifest", ev_manifest, "Corpus manifest (JSONL)")->required();
    evaluate_cmd->add_option("--model", ev_model, "Model JSON")->required();
    evaluate_cmd->add_option("--exclude", ev_exclude, "Contaminated frame to skip");
    evaluate_cmd->add_option("-o,--out", ev_out, "Report basename (.json/.txt appended)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
    std::string sy_out, sy_fills = "0.1,0.25,0.5,0.75,1.0", sy_skews = "0", sy_size;
    int sy_count = 1;
    std::uint64_t sy_seed = 0;
    double sy_texture = 96.0, sy_wall_noise = 4.0;
    synth->add_option("--out", sy_out, "Output directory")->required();
    synth->add_option("--count", sy_count, "Number of frames")->required();
    synth->add_option("--fills", sy_fills, "Comma-separated fill fractions");
    synth->add_option("--skew", sy_skews, "Comma-separated skews in [-1,1]");
    synth->add_option("--seed", sy_seed, "Corpus RNG seed");
    synth->add_option("--texture", sy_texture, "Material texture amplitude");
    synth->add_option("--wall-noise", sy_wall_noise, "Empty-wall noise amplitude");
    synth->add_option("--size", sy_size, "Frame size WxH (default 640x480)");

    // watch
    auto* watch = app.add_subcommand("watch", "Monitor a directory of incoming frames");
    std::string wa_dir, wa_model, wa_config;
    int wa_interval = 500;
    watch->add_option("dir", wa_dir, "Directory to watch")->required();
    watch->add_option("--model", wa_model, "Model JSON")->required();
    watch->add_option("--config", wa_config, "Line config JSON");
    watch->add_option("--interval-ms", wa_interval, "Poll interval in milliseconds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(an_model, an_config, an_images);
        if (calibrate_cmd->parsed())
            return cmd_calibrate(ca_manifest, ca_config, ca_kind, ca_baseline, ca_out);
        if (evaluate_cmd->parsed())
            return cmd_evaluate(ev_manifest, ev_model, ev_exclude, ev_out);
        if (synth->parsed()) {
            CorpusSpec spec;
            spec.out_dir = sy_out;
            spec.count = sy_count;
            spec.fill_set = parse_double_list(sy_fills, "fills");
            spec.skew_set = parse_double_list(sy_skews, "skew");
            spec.seed = sy_seed;
            spec.base.texture_amplitude = sy_texture;
            spec.base.wall_noise = sy_wall_noise;
            if (!sy_size.empty()) {
                const auto x = sy_size.find('x');
                if (x == std::string::npos)
                    throw InvalidParams("--size must look like 640x480");
                spec.base.width = std::stoi(sy_size.substr(0, x));
                spec.base.height = std::stoi(sy_size.substr(x + 1));
            }
            return cmd_synth(spec);
        }
        if (watch->parsed()) return cmd_watch(wa_dir, wa_model, wa_config, wa_interval);
    } catch (const MalformedModel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformed;
    } catch (const MalformedConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformed;
    } catch (const MissingClass& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCalibration;
    } catch (const NonMonotoneClasses& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCalibration;
    } catch (const DegenerateGate& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCalibration;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
