#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "srpedge/config.hpp"
#include "srpedge/eval.hpp"
#include "srpedge/feature.hpp"
#include "srpedge/net.hpp"
#include "srpedge/simroom.hpp"
#include "srpedge/srp.hpp"
#include "srpedge/tensor_io.hpp"

namespace srpedge {

struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what) {}
};

inline Scene scene_from_config(const RunConfig& c) {
    Scene s;
    s.room_dims = c.room;
    s.t60_s = c.t60;
    s.snr_db = c.snr_db;
    s.array_center = c.array_center;
    s.seed = c.seed;
    for (const Vec3& p : c.source_positions) {
        s.trajectory.push_back({p, c.segment_duration_s});
    }
    return s;
}

inline void write_truth_csv(const std::string& path, const std::vector<FrameTruth>& truth) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "frame_index,elevation_deg,azimuth_deg\n";
    f.precision(10);
    for (const auto& t : truth) {
        f << t.frame_index << ',' << t.elevation_deg << ',' << t.azimuth_deg << '\n';
    }
}

inline void write_srp_csv(const std::string& path, const std::vector<SrpFrame>& frames,
                          const CandidateGrid& grid) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "frame_index,argmax_elevation_deg,argmax_azimuth_deg";
    for (int q = 0; q < grid.candidate_count(); ++q) f << ",p" << q;
    f << '\n';
    f.precision(10);
    for (const auto& fr : frames) {
        const double el =
            grid.elevations[static_cast<std::size_t>(fr.argmax_elevation)] * 180.0 /
            std::numbers::pi;
        const double az =
            grid.azimuths[static_cast<std::size_t>(fr.argmax_azimuth)] * 180.0 / std::numbers::pi;
        f << fr.frame_index << ',' << el << ',' << az;
        for (double p : fr.power) f << ',' << p;
        f << '\n';
    }
}

inline void write_doa_csv(const std::string& path,
                          const std::vector<std::array<double, 3>>& doas) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "frame_index,x,y,z,elevation_deg,azimuth_deg\n";
    f.precision(10);
    const auto unit = normalize_doas(doas);
    for (std::size_t i = 0; i < doas.size(); ++i) {
        const auto& v = unit[i];
        const double el = std::asin(std::clamp(v[2], -1.0, 1.0)) * 180.0 / std::numbers::pi;
        double az = std::atan2(v[1], v[0]) * 180.0 / std::numbers::pi;
        if (az < 0) az += 360.0;
        f << i << ',' << doas[i][0] << ',' << doas[i][1] << ',' << doas[i][2] << ',' << el << ','
          << az << '\n';
    }
}

inline TensorFile feature_to_tensor_file(const FeatureTensor& ft, const RunConfig& c) {
    TensorFile tf;
    tf.res1 = static_cast<std::uint32_t>(ft.res_elevation);
    tf.res2 = static_cast<std::uint32_t>(ft.res_azimuth);
    tf.channels = static_cast<std::uint32_t>(c.channels());
    tf.depthwise = c.depthwise() ? 1 : 0;
    TensorEntry e;
    e.name = "feature";
    e.dims = {3u, static_cast<std::uint32_t>(ft.time), static_cast<std::uint32_t>(ft.res_elevation),
              static_cast<std::uint32_t>(ft.res_azimuth)};
    e.data.assign(ft.data.begin(), ft.data.end());
    tf.tensors.push_back(std::move(e));
    return tf;
}

inline FeatureTensor feature_from_tensor_file(const TensorFile& tf) {
    const TensorEntry* e = tf.find("feature");
    if (e == nullptr || e->dims.size() != 4 || e->dims[0] != 3) {
        throw std::runtime_error("feature tensor file: missing 3xTxR1xR2 'feature' tensor");
    }
    FeatureTensor ft;
    ft.time = static_cast<int>(e->dims[1]);
    ft.res_elevation = static_cast<int>(e->dims[2]);
    ft.res_azimuth = static_cast<int>(e->dims[3]);
    ft.data.assign(e->data.begin(), e->data.end());
    return ft;
}

// CSV truth/estimate readers shared by the eval stage and the CLI.
inline std::vector<Vec3> read_angles_csv(const std::string& path, int el_col, int az_col) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<Vec3> out;
    std::string line;
    bool header = true;
    while (std::getline(f, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (static_cast<int>(cols.size()) <= std::max(el_col, az_col)) continue;
        const double el = std::stod(cols[static_cast<std::size_t>(el_col)]) * std::numbers::pi /
                          180.0;
        const double az = std::stod(cols[static_cast<std::size_t>(az_col)]) * std::numbers::pi /
                          180.0;
        out.push_back(direction_from_angles(el, az));
    }
    return out;
}

inline std::vector<bool> read_vad_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<bool> out;
    std::string line;
    bool header = true;
    while (std::getline(f, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find_last_of(',');
        out.push_back(std::stoi(line.substr(comma + 1)) != 0);
    }
    return out;
}

struct MetricsResult {
    double rmsae = 0.0, mae = 0.0, rmsae_per_axis = 0.0, grid_ratio = 0.0;
    std::size_t frames = 0;
};

inline MetricsResult compute_metrics(const DoaSeries& series, const CandidateGrid& grid,
                                     bool masked) {
    MetricsResult m;
    m.rmsae = rmsae_deg(series, masked);
    m.mae = mae_deg(series, masked);
    m.rmsae_per_axis = rmsae_per_axis_deg(series, masked);
    m.grid_ratio = srp_grid_ratio(m.rmsae, grid);
    m.frames = series.truth.size();
    return m;
}

inline std::string metrics_json(const MetricsResult& srp, const MetricsResult& net) {
    std::ostringstream os;
    os.precision(10);
    auto block = [&os](const char* name, const MetricsResult& m, bool last) {
        os << "  \"" << name << "\": {\"rmsae_deg\": " << m.rmsae << ", \"mae_deg\": " << m.mae
           << ", \"rmsae_per_axis_deg\": " << m.rmsae_per_axis
           << ", \"rmsae_over_srp_grid\": " << m.grid_ratio << ", \"frames\": " << m.frames << "}"
           << (last ? "\n" : ",\n");
    };
    os << "{\n";
    block("srp", srp, false);
    block("net", net, true);
    os << "}\n";
    return os.str();
}

struct PipelineArtifacts {
    std::string wav_path, truth_path, srp_path, feature_path, doa_path, metrics_path;
    MetricsResult srp_metrics, net_metrics;
};

// synth -> srp -> infer -> eval, artifacts under config.out_dir. Deterministic
// for a fixed config and seed.
inline PipelineArtifacts run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    PipelineArtifacts art;
    const std::string base = cfg.out_dir + "/";

    // synth
    RenderedScene rendered;
    MicArray array;
    try {
        array = cfg.load_array();
        const Scene scene = scene_from_config(cfg);
        const std::size_t dry_len = static_cast<std::size_t>(cfg.clip_seconds * cfg.fs);
        std::vector<double> dry;
        if (cfg.dry_path.empty()) {
            dry = make_noise_dry(dry_len, cfg.seed + 17);
        } else {
            const AudioClip d = load_wav(cfg.dry_path, 1);
            if (d.sample_rate_hz != cfg.fs) {
                throw std::runtime_error("dry signal sample rate does not match config fs");
            }
            dry = d.samples[0];
            dry.resize(std::min(dry_len, dry.size()));
        }
        rendered = render_scene(scene, array, dry, cfg.fs);
        art.wav_path = base + "scene.wav";
        save_wav(art.wav_path, rendered.clip);
        art.truth_path = base + "truth.csv";
        write_truth_csv(art.truth_path, frame_truth(rendered, scene.array_center, cfg.frame_spec()));
    } catch (const std::exception& e) {
        throw StageError("synth", e.what());
    }

    // srp
    std::vector<SrpFrame> frames;
    CandidateGrid grid;
    try {
        SrpPipeline pipe;
        pipe.array = array;
        pipe.grid = grid = build_grid(cfg.res1, cfg.res2);
        pipe.frame = cfg.frame_spec();
        pipe.fs = cfg.fs;
        pipe.method = cfg.method;
        pipe.threads = cfg.threads;
        frames = srp_sequence(rendered.clip, pipe);
        art.srp_path = base + "srp.csv";
        write_srp_csv(art.srp_path, frames, grid);
        art.feature_path = base + "feature.c3de";
        feature_to_tensor_file(assemble(frames), cfg).write(art.feature_path);
    } catch (const std::exception& e) {
        throw StageError("srp", e.what());
    }

    // infer
    try {
        const NetworkGraph graph = build_graph(cfg.res1, cfg.res2, cfg.channels(), cfg.depthwise());
        WeightBundle weights;
        if (cfg.weights_path.empty()) {
            std::cerr << "warning: no weights file given; using seeded random weights (seed "
                      << cfg.seed << ") — DOA estimates are untrained\n";
            weights = make_random_weights(graph, cfg.seed);
        } else {
            if (!fs::exists(cfg.weights_path)) throw std::runtime_error("weights not found");
            weights = load_weights(cfg.weights_path);
        }
        const FeatureTensor ft = feature_from_tensor_file(TensorFile::read(art.feature_path));
        art.doa_path = base + "doa.csv";
        write_doa_csv(art.doa_path, infer(graph, weights, ft));
    } catch (const std::exception& e) {
        throw StageError("infer", e.what());
    }

    // eval
    try {
        const std::vector<Vec3> truth = read_angles_csv(art.truth_path, 1, 2);
        DoaSeries srp_series{truth, read_angles_csv(art.srp_path, 1, 2), {}};
        DoaSeries net_series{truth, read_angles_csv(art.doa_path, 4, 5), {}};
        art.srp_metrics = compute_metrics(srp_series, grid, false);
        art.net_metrics = compute_metrics(net_series, grid, false);
        art.metrics_path = base + "metrics.json";
        std::ofstream f(art.metrics_path, std::ios::trunc);
        f << metrics_json(art.srp_metrics, art.net_metrics);
    } catch (const std::exception& e) {
        throw StageError("eval", e.what());
    }
    return art;
}

// Wall-clock throughput per stage; asserts nothing about absolute latency.
inline std::string bench(const RunConfig& cfg) {
    cfg.validate();
    using clock = std::chrono::steady_clock;
    const MicArray array = cfg.load_array();
    const Scene scene = scene_from_config(cfg);
    const std::size_t dry_len = static_cast<std::size_t>(cfg.clip_seconds * cfg.fs);

    auto t0 = clock::now();
    const RenderedScene rendered =
        render_scene(scene, array, make_noise_dry(dry_len, cfg.seed + 17), cfg.fs);
    auto t1 = clock::now();

    SrpPipeline pipe;
    pipe.array = array;
    pipe.grid = build_grid(cfg.res1, cfg.res2);
    pipe.frame = cfg.frame_spec();
    pipe.fs = cfg.fs;
    pipe.method = cfg.method;
    pipe.threads = cfg.threads;
    const std::vector<SrpFrame> frames = srp_sequence(rendered.clip, pipe);
    auto t2 = clock::now();

    const NetworkGraph graph = build_graph(cfg.res1, cfg.res2, cfg.channels(), cfg.depthwise());
    const WeightBundle weights = make_random_weights(graph, cfg.seed);
    const FeatureTensor ft = assemble(frames);
    const auto doas = infer(graph, weights, ft);
    auto t3 = clock::now();

    auto secs = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };
    const double srp_s = secs(t1, t2);
    std::ostringstream os;
    os.precision(6);
    os << "{\n"
       << "  \"method\": \"" << to_string(cfg.method) << "\",\n"
       << "  \"variant\": \"" << to_string(cfg.variant) << "\",\n"
       << "  \"frames\": " << frames.size() << ",\n"
       << "  \"stage_seconds\": {\"synth\": " << secs(t0, t1) << ", \"srp\": " << srp_s
       << ", \"infer\": " << secs(t2, t3) << "},\n"
       << "  \"srp_frames_per_second\": " << (srp_s > 0 ? frames.size() / srp_s : 0.0) << ",\n"
       << "  \"doa_frames\": " << doas.size() << "\n"
       << "}\n";
    return os.str();
}

}  // namespace srpedge
