#ifndef HOPPERSTAT_SYNTH_HPP
#define HOPPERSTAT_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hopperstat/classifier.hpp"
#include "hopperstat/codec.hpp"
#include "hopperstat/errors.hpp"
#include "hopperstat/image.hpp"

namespace hopperstat {

/// splitmix64: the corpus RNG. Fixed algorithm so generated corpora are
/// byte-identical across platforms and compilers.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-half_span, +half_span).
    double next_centered(double half_span) {
        return (next_unit() * 2.0 - 1.0) * half_span;
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 g(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
        return g.next();
    }

private:
    std::uint64_t state_;
};

struct SynthParams {
    int width = 640;
    int height = 480;
    double fill = 0.5;              // fraction of hopper height covered by material
    double texture_amplitude = 96;  // peak-to-peak luminance of material texture
    double wall_value = 120;        // luminance of the empty hopper surface
    double wall_noise = 4;          // peak-to-peak roughness of empty walls (rust, stains)
    double skew = 0.0;              // lateral pile bias, [-1, 1]
    std::uint64_t seed = 0;

    void validate() const {
        if (width < 16 || height < 16)
            throw InvalidParams("width/height must be >= 16, got " + std::to_string(width) +
                                "x" + std::to_string(height));
        if (fill < 0.0 || fill > 1.0)
            throw InvalidParams("fill must be in [0,1], got " + std::to_string(fill));
        if (skew < -1.0 || skew > 1.0)
            throw InvalidParams("skew must be in [-1,1], got " + std::to_string(skew));
        if (wall_noise < 0.0)
            throw InvalidParams("wall_noise must be >= 0, got " + std::to_string(wall_noise));
        if (!(texture_amplitude > wall_noise))
            throw InvalidParams("texture_amplitude (" + std::to_string(texture_amplitude) +
                                ") must exceed wall_noise (" + std::to_string(wall_noise) + ")");
    }
};

/// Fraction of hopper height the pile surface can bulge above its nominal
/// line. Sized so that material starts touching the default L1 row
/// (20% of height) once fill reaches 0.75.
inline constexpr double kPileRoughness = 0.08;

/// Snaps a continuous fill fraction to the nearest nominal class;
/// exact midpoints round up.
inline FullnessClass label_of(double fill) {
    if (fill < 0.0 || fill > 1.0)
        throw InvalidParams("fill must be in [0,1], got " + std::to_string(fill));
    double min_d = 1.0;
    for (double nominal : kNominalFill) min_d = std::min(min_d, std::abs(fill - nominal));
    // ties (exact midpoints, up to rounding noise) prefer the higher class
    FullnessClass best = FullnessClass::P10;
    for (std::size_t i = 0; i < kNominalFill.size(); ++i)
        if (std::abs(fill - kNominalFill[i]) <= min_d + 1e-12) best = kAllClasses[i];
    return best;
}

struct SynthFrame {
    GrayImage image;
    FullnessClass truth;
    double fill;
};

/// Renders one hopper frame: a textured pile rising from the bottom under
/// smooth walls. The pile surface at column x is fill*height, tilted
/// linearly by skew (zero tilt at the center column) with a ragged
/// upward bulge of at most kPileRoughness*height.
///
/// RNG draw order, fixed for reproducibility: one bulge draw per column,
/// then one draw per pixel in row-major order.
inline SynthFrame generate(const SynthParams& p) {
    p.validate();
    SplitMix64 rng(p.seed);

    const int w = p.width, h = p.height;

    // Top row of material per column; h means no material in the column.
    std::vector<double> pile_top(static_cast<std::size_t>(w));
    for (int x = 0; x < w; ++x) {
        const double t = w > 1 ? static_cast<double>(x) / (w - 1) : 0.5;
        const double bulge = rng.next_unit() * kPileRoughness * h;
        const double local_fill = std::clamp(p.fill * (1.0 + p.skew * (0.5 - t)), 0.0, 1.0);
        double rows = local_fill > 0.0 ? local_fill * h + bulge : 0.0;
        rows = std::min(rows, static_cast<double>(h));
        pile_top[static_cast<std::size_t>(x)] = h - rows;
    }

    std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool material = static_cast<double>(y) >= pile_top[static_cast<std::size_t>(x)];
            const double amp = material ? p.texture_amplitude : p.wall_noise;
            const double v = p.wall_value + rng.next_centered(amp / 2.0);
            data[static_cast<std::size_t>(y) * w + x] =
                static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }

    return SynthFrame{GrayImage(w, h, std::move(data)), label_of(p.fill), p.fill};
}

struct ManifestEntry {
    std::string file;
    FullnessClass truth = FullnessClass::P10;
    double fill = 0.0;
    double skew = 0.0;
    std::uint64_t seed = 0;
};

inline nlohmann::json manifest_entry_json(const ManifestEntry& e) {
    return nlohmann::json{{"file", e.file},
                          {"truth", class_name(e.truth)},
                          {"fill", e.fill},
                          {"skew", e.skew},
                          {"seed", e.seed}};
}

inline ManifestEntry manifest_entry_from_json(const nlohmann::json& j) {
    try {
        ManifestEntry e;
        e.file = j.at("file").get<std::string>();
        const auto truth = class_from_name(j.at("truth").get<std::string>());
        if (!truth) throw MalformedManifest("unknown truth " + j.at("truth").dump());
        e.truth = *truth;
        e.fill = j.value("fill", 0.0);
        e.skew = j.value("skew", 0.0);
        e.seed = j.value("seed", std::uint64_t{0});
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw MalformedManifest(ex.what());
    }
}

inline std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open manifest '" + path + "'");
    std::vector<ManifestEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw MalformedManifest(path + ":" + std::to_string(lineno) + " is not valid JSON");
        out.push_back(manifest_entry_from_json(j));
    }
    return out;
}

struct CorpusSpec {
    std::string out_dir;
    int count = 1;
    std::vector<double> fill_set;
    std::vector<double> skew_set = {0.0};
    std::uint64_t seed = 0;
    SynthParams base; // width/height/texture/wall parameters; fill/skew/seed overwritten
};

/// Writes `count` PGM frames plus manifest.jsonl. Frame i takes
/// fill_set[i % |fills|], skew_set[(i / |fills|) % |skews|], and an RNG
/// stream derived solely from (seed, i).
inline std::vector<ManifestEntry> generate_corpus(const CorpusSpec& spec) {
    if (spec.count < 1) throw InvalidParams("count must be >= 1");
    if (spec.fill_set.empty()) throw InvalidParams("fill_set must be nonempty");
    if (spec.skew_set.empty()) throw InvalidParams("skew_set must be nonempty");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(spec.out_dir, ec);
    if (ec) throw IoFailure("cannot create '" + spec.out_dir + "': " + ec.message());

    std::vector<ManifestEntry> manifest;
    manifest.reserve(static_cast<std::size_t>(spec.count));

    for (int i = 0; i < spec.count; ++i) {
        SynthParams p = spec.base;
        p.fill = spec.fill_set[static_cast<std::size_t>(i) % spec.fill_set.size()];
        p.skew = spec.skew_set[(static_cast<std::size_t>(i) / spec.fill_set.size()) %
                               spec.skew_set.size()];
        p.seed = SplitMix64::mix(spec.seed, static_cast<std::uint64_t>(i));

        const SynthFrame frame = generate(p);

        char name[32];
        std::snprintf(name, sizeof(name), "frame_%05d.pgm", i);
        write_file_bytes((fs::path(spec.out_dir) / name).string(), encode_pgm(frame.image));

        manifest.push_back(ManifestEntry{name, frame.truth, p.fill, p.skew, p.seed});
    }

    std::ofstream mf(fs::path(spec.out_dir) / "manifest.jsonl", std::ios::trunc);
    if (!mf) throw IoFailure("cannot write manifest in '" + spec.out_dir + "'");
    for (const auto& e : manifest) mf << manifest_entry_json(e).dump() << "\n";
    if (!mf.flush()) throw IoFailure("write error on manifest in '" + spec.out_dir + "'");

    return manifest;
}

} // namespace hopperstat

#endif // HOPPERSTAT_SYNTH_HPP
