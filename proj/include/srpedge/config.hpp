#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "srpedge/geometry.hpp"
#include "srpedge/signal.hpp"
#include "srpedge/srp.hpp"

namespace srpedge {

enum class ModelVariant { kBaseline, kEdgeLarge, kEdgeMedium, kEdgeSmall };

inline ModelVariant variant_from_string(const std::string& s) {
    if (s == "baseline") return ModelVariant::kBaseline;
    if (s == "EL" || s == "el" || s == "edge-large") return ModelVariant::kEdgeLarge;
    if (s == "EM" || s == "em" || s == "edge-medium") return ModelVariant::kEdgeMedium;
    if (s == "ES" || s == "es" || s == "edge-small") return ModelVariant::kEdgeSmall;
    throw std::invalid_argument("unknown model variant: " + s);
}

inline std::string to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::kBaseline: return "baseline";
        case ModelVariant::kEdgeLarge: return "EL";
        case ModelVariant::kEdgeMedium: return "EM";
        case ModelVariant::kEdgeSmall: return "ES";
    }
    return "?";
}

inline int variant_channels(ModelVariant v) {
    switch (v) {
        case ModelVariant::kBaseline: return 32;
        case ModelVariant::kEdgeLarge: return 32;
        case ModelVariant::kEdgeMedium: return 16;
        case ModelVariant::kEdgeSmall: return 8;
    }
    return 32;
}

inline bool variant_depthwise(ModelVariant v) { return v != ModelVariant::kBaseline; }

// Flat key = value run configuration shared by every subcommand.
struct RunConfig {
    int version = 1;
    std::string array_path;  // empty = shipped default geometry
    int res1 = 8, res2 = 16;
    int fs = 16000;
    int k = 4096;
    double overlap = 0.25;
    SrpMethod method = SrpMethod::kLcEdge;
    ModelVariant variant = ModelVariant::kEdgeMedium;
    std::string weights_path;  // empty = seeded random weights
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 1;

    // Scene block for synth/run.
    Vec3 room{6.0, 5.0, 4.0};
    double t60 = 0.0;
    double snr_db = std::numeric_limits<double>::infinity();
    Vec3 array_center{3.0, 2.5, 1.7};
    std::vector<Vec3> source_positions{{5.0, 4.0, 2.0}};
    double segment_duration_s = 1.0;
    double clip_seconds = 1.0;
    std::string dry_path;  // empty = seeded white noise

    MicArray load_array() const {
        return array_path.empty() ? default_mic_array() : load_mic_array(array_path);
    }
    FrameSpec frame_spec() const {
        FrameSpec f;
        f.window_len = k;
        f.overlap_ratio = overlap;
        f.window = WindowKind::kHann;
        f.validate();
        return f;
    }
    int channels() const { return variant_channels(variant); }
    bool depthwise() const { return variant_depthwise(variant); }

    void validate() const {
        if (version != 1) throw std::invalid_argument("config: unsupported version");
        frame_spec();
        if (fs < 4000) throw std::invalid_argument("config: fs must be >= 4000");
        if (res1 < 2 || res2 < 2) throw std::invalid_argument("config: grid too small");
        if (clip_seconds <= 0) throw std::invalid_argument("config: clip_seconds must be positive");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline Vec3 parse_vec3(const std::string& s) {
    std::string t = s;
    for (char& c : t) {
        if (c == '[' || c == ']' || c == ',') c = ' ';
    }
    std::istringstream is(t);
    Vec3 v;
    if (!(is >> v.x >> v.y >> v.z)) throw std::invalid_argument("config: expected x,y,z: " + s);
    return v;
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (!key.empty()) kv[key] = value;
    }
    RunConfig c;
    auto get = [&kv](const std::string& key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (const auto* v = get("version")) c.version = std::stoi(*v);
    if (const auto* v = get("array")) c.array_path = *v;
    if (const auto* v = get("grid")) {
        const auto x = v->find('x');
        if (x == std::string::npos) throw std::invalid_argument("config: grid must be R1xR2");
        c.res1 = std::stoi(v->substr(0, x));
        c.res2 = std::stoi(v->substr(x + 1));
    }
    if (const auto* v = get("fs")) c.fs = std::stoi(*v);
    if (const auto* v = get("k")) c.k = std::stoi(*v);
    if (const auto* v = get("overlap")) c.overlap = std::stod(*v);
    if (const auto* v = get("method")) c.method = srp_method_from_string(*v);
    if (const auto* v = get("variant")) c.variant = variant_from_string(*v);
    if (const auto* v = get("weights")) c.weights_path = *v;
    if (const auto* v = get("seed")) c.seed = std::stoull(*v);
    if (const auto* v = get("out_dir")) c.out_dir = *v;
    if (const auto* v = get("threads")) c.threads = std::stoi(*v);
    if (const auto* v = get("room")) c.room = detail::parse_vec3(*v);
    if (const auto* v = get("t60")) c.t60 = std::stod(*v);
    if (const auto* v = get("snr_db")) {
        c.snr_db = (*v == "inf") ? std::numeric_limits<double>::infinity() : std::stod(*v);
    }
    if (const auto* v = get("array_center")) c.array_center = detail::parse_vec3(*v);
    if (const auto* v = get("source")) {
        c.source_positions.clear();
        std::string rest = *v;
        std::size_t pos = 0;
        while (pos < rest.size()) {
            auto semi = rest.find(';', pos);
            if (semi == std::string::npos) semi = rest.size();
            c.source_positions.push_back(detail::parse_vec3(rest.substr(pos, semi - pos)));
            pos = semi + 1;
        }
    }
    if (const auto* v = get("segment_duration")) c.segment_duration_s = std::stod(*v);
    if (const auto* v = get("clip_seconds")) c.clip_seconds = std::stod(*v);
    if (const auto* v = get("dry")) c.dry_path = *v;
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace srpedge
