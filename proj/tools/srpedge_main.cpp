#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "srpedge/srpedge.hpp"

namespace {

using namespace srpedge;

Vec3 parse_xyz(const std::string& s) { return detail::parse_vec3(s); }

MicArray array_from_flag(const std::string& path) {
    return path.empty() ? default_mic_array() : load_mic_array(path);
}

int cmd_synth(const std::string& array_path, const std::string& room, double t60,
              const std::string& src, double snr, std::uint64_t seed, const std::string& dry,
              const std::string& out, const std::string& truth_out, int fs, int k, double overlap,
              double seg_dur, double seconds) {
    MicArray array = array_from_flag(array_path);
    Scene scene;
    scene.room_dims = parse_xyz(room);
    scene.t60_s = t60;
    scene.snr_db = snr;
    scene.seed = seed;
    scene.array_center = Vec3{scene.room_dims.x / 2, scene.room_dims.y / 2, scene.room_dims.z / 2};
    std::size_t pos = 0;
    while (pos < src.size()) {
        auto semi = src.find(';', pos);
        if (semi == std::string::npos) semi = src.size();
        scene.trajectory.push_back({parse_xyz(src.substr(pos, semi - pos)), seg_dur});
        pos = semi + 1;
    }
    std::vector<double> dry_sig;
    if (dry.empty()) {
        dry_sig = make_noise_dry(static_cast<std::size_t>(seconds * fs), seed + 17);
    } else {
        const AudioClip d = load_wav(dry, 1);
        if (d.sample_rate_hz != fs) throw std::runtime_error("synth: dry fs != --fs");
        dry_sig = d.samples[0];
    }
    const RenderedScene rendered = render_scene(scene, array, dry_sig, fs);
    save_wav(out, rendered.clip);
    if (!truth_out.empty()) {
        FrameSpec spec;
        spec.window_len = k;
        spec.overlap_ratio = overlap;
        write_truth_csv(truth_out, frame_truth(rendered, scene.array_center, spec));
    }
    std::cout << "synth: wrote " << out << " (" << rendered.clip.channel_count() << " ch, "
              << rendered.clip.length() << " samples)\n";
    return 0;
}

int cmd_srp(const std::string& method, const std::string& grid_str, int fs, int k, double overlap,
            const std::string& array_path, const std::string& in, const std::string& out,
            const std::string& feature_out, int threads) {
    const auto x = grid_str.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("--grid must be R1xR2");
    SrpPipeline pipe;
    pipe.array = array_from_flag(array_path);
    pipe.grid = build_grid(std::stoi(grid_str.substr(0, x)), std::stoi(grid_str.substr(x + 1)));
    pipe.frame.window_len = k;
    pipe.frame.overlap_ratio = overlap;
    pipe.fs = fs;
    pipe.method = srp_method_from_string(method);
    pipe.threads = threads;
    const AudioClip clip = load_wav(in);
    const std::vector<SrpFrame> frames = srp_sequence(clip, pipe);
    if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") {
        write_srp_csv(out, frames, pipe.grid);
    } else {
        RunConfig cfg;
        cfg.res1 = pipe.grid.res_elevation;
        cfg.res2 = pipe.grid.res_azimuth;
        cfg.fs = fs;
        cfg.k = k;
        cfg.overlap = overlap;
        feature_to_tensor_file(assemble(frames), cfg).write(out);
    }
    if (!feature_out.empty()) {
        RunConfig cfg;
        cfg.res1 = pipe.grid.res_elevation;
        cfg.res2 = pipe.grid.res_azimuth;
        feature_to_tensor_file(assemble(frames), cfg).write(feature_out);
    }
    std::cout << "srp: " << frames.size() << " frames (" << method << ")\n";
    return 0;
}

int cmd_infer(const std::string& weights_path, const std::string& input, const std::string& out) {
    if (!std::filesystem::exists(weights_path)) {
        throw StageError("infer", "weights not found");
    }
    const WeightBundle weights = load_weights(weights_path);
    const NetworkGraph graph =
        build_graph(static_cast<int>(weights.res1), static_cast<int>(weights.res2),
                    static_cast<int>(weights.channels), weights.depthwise != 0);
    const FeatureTensor ft = feature_from_tensor_file(TensorFile::read(input));
    write_doa_csv(out, infer(graph, weights, ft));
    std::cout << "infer: wrote " << out << "\n";
    return 0;
}

int cmd_eval(const std::string& est, const std::string& truth, const std::string& vad,
             const std::string& grid_str, const std::string& out) {
    const auto x = grid_str.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("--grid must be R1xR2");
    const CandidateGrid grid =
        build_grid(std::stoi(grid_str.substr(0, x)), std::stoi(grid_str.substr(x + 1)));
    // Estimate CSVs carry angles in (el,az) columns 1,2 for SRP argmax files
    // and 4,5 for infer output; sniff by header width.
    std::ifstream probe(est);
    std::string header;
    std::getline(probe, header);
    const bool doa_layout = header.rfind("frame_index,x,y,z", 0) == 0;
    DoaSeries series;
    series.truth = read_angles_csv(truth, 1, 2);
    series.estimate = doa_layout ? read_angles_csv(est, 4, 5) : read_angles_csv(est, 1, 2);
    if (!vad.empty()) series.vad = read_vad_csv(vad);
    const bool masked = !series.vad.empty();
    const MetricsResult m = compute_metrics(series, grid, masked);
    std::ostringstream os;
    os.precision(10);
    os << "{\"rmsae_deg\": " << m.rmsae << ", \"mae_deg\": " << m.mae
       << ", \"rmsae_per_axis_deg\": " << m.rmsae_per_axis
       << ", \"rmsae_over_srp_grid\": " << m.grid_ratio << ", \"frames\": " << m.frames << "}\n";
    if (out.empty() || out == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(out, std::ios::trunc);
        f << os.str();
        std::cout << "eval: wrote " << out << "\n";
    }
    return 0;
}

int cmd_cost(const std::string& config_path, const std::string& out) {
    const RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    const MicArray array = cfg.load_array();
    const CandidateGrid grid = build_grid(cfg.res1, cfg.res2);
    const SrpCostInputs in =
        SrpCostInputs::from_geometry(array, grid, cfg.k, cfg.fs, cfg.overlap);
    std::vector<CostReport> reports;
    for (ModelVariant v : {ModelVariant::kBaseline, ModelVariant::kEdgeLarge,
                           ModelVariant::kEdgeMedium, ModelVariant::kEdgeSmall}) {
        const SrpMethod method = v == ModelVariant::kBaseline ? SrpMethod::kTd : cfg.method;
        const NetworkGraph g =
            build_graph(cfg.res1, cfg.res2, variant_channels(v), variant_depthwise(v));
        reports.push_back(combined_cost(to_string(v), method, in, g));
    }
    const bool json = out == "json" || (out.size() > 5 && out.substr(out.size() - 5) == ".json");
    const std::string text = json ? roofline_json(reports) : roofline_csv(reports);
    if (out == "csv" || out == "json" || out.empty() || out == "-") {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::trunc);
        f << text;
        std::cout << "cost: wrote " << out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SRP-PHAT feature family, causal CNN inference, scene synthesis and "
                 "hardware cost model"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Render a shoebox scene to a multichannel WAV");
    std::string sy_room = "6,5,4", sy_src = "5,4,2", sy_array, sy_dry, sy_out = "scene.wav",
                sy_truth;
    double sy_t60 = 0.0, sy_snr = std::numeric_limits<double>::infinity(), sy_seg = 1.0,
           sy_sec = 1.0, sy_ov = 0.25;
    std::uint64_t sy_seed = 1;
    int sy_fs = 16000, sy_k = 4096;
    synth->add_option("--room", sy_room, "Room dimensions X,Y,Z in meters");
    synth->add_option("--t60", sy_t60, "Reverberation target in seconds (0 = anechoic)");
    synth->add_option("--src", sy_src, "Source position(s) x,y,z[;x,y,z...]");
    synth->add_option("--array", sy_array, "Array geometry file (default: built-in 12-mic)");
    synth->add_option("--snr", sy_snr, "SNR in dB (omit for noiseless)");
    synth->add_option("--seed", sy_seed, "Random seed");
    synth->add_option("--dry", sy_dry, "Dry mono WAV (default: seeded white noise)");
    synth->add_option("--out", sy_out, "Output WAV")->required();
    synth->add_option("--truth", sy_truth, "Per-frame ground-truth DOA CSV");
    synth->add_option("--fs", sy_fs, "Sample rate");
    synth->add_option("--k", sy_k, "Window length for truth framing");
    synth->add_option("--overlap", sy_ov, "Window overlap for truth framing");
    synth->add_option("--segment-duration", sy_seg, "Trajectory segment duration (s)");
    synth->add_option("--seconds", sy_sec, "Clip length when generating noise dry (s)");

    // srp
    auto* srp = app.add_subcommand("srp", "Compute SRP-PHAT maps from a multichannel WAV");
    std::string sr_method = "lc-edge", sr_grid = "8x16", sr_array, sr_in, sr_out, sr_feat;
    int sr_fs = 16000, sr_k = 4096, sr_threads = 1;
    double sr_ov = 0.25;
    srp->add_option("--method", sr_method, "fd | td | lc | lc-edge");
    srp->add_option("--grid", sr_grid, "Candidate grid R1xR2");
    srp->add_option("--fs", sr_fs, "Sample rate");
    srp->add_option("--k", sr_k, "Window length");
    srp->add_option("--overlap", sr_ov, "Window overlap ratio");
    srp->add_option("--array", sr_array, "Array geometry file");
    srp->add_option("--in", sr_in, "Input WAV")->required();
    srp->add_option("--out", sr_out, "Output (.csv per-frame maps, else feature tensor)")
        ->required();
    srp->add_option("--feature", sr_feat, "Also write the network feature tensor");
    srp->add_option("--threads", sr_threads, "Worker threads");

    // infer
    auto* inf = app.add_subcommand("infer", "Run the causal CNN on a feature tensor");
    std::string in_w, in_x, in_out = "doa.csv";
    inf->add_option("--weights", in_w, "Weight bundle")->required();
    inf->add_option("--input", in_x, "Feature tensor file")->required();
    inf->add_option("--out", in_out, "Output CSV");

    // eval
    auto* ev = app.add_subcommand("eval", "Score estimates against ground truth");
    std::string ev_est, ev_truth, ev_vad, ev_grid = "8x16", ev_out;
    ev->add_option("--est", ev_est, "Estimate CSV (srp or infer output)")->required();
    ev->add_option("--truth", ev_truth, "Ground-truth CSV")->required();
    ev->add_option("--vad", ev_vad, "Optional VAD CSV (frame_index,active)");
    ev->add_option("--grid", ev_grid, "Grid R1xR2 for the SRP-Grid ratio");
    ev->add_option("--out", ev_out, "Metrics JSON path (default stdout)");

    // cost
    auto* co = app.add_subcommand("cost", "Emit the hardware-overhead model");
    std::string co_cfg, co_out = "csv";
    co->add_option("--config", co_cfg, "Run configuration file");
    co->add_option("--out", co_out, "csv | json | output path");

    // bench
    auto* be = app.add_subcommand("bench", "Per-stage wall-clock throughput report");
    std::string be_cfg, be_out;
    be->add_option("--config", be_cfg, "Run configuration file");
    be->add_option("--out", be_out, "Report JSON path (default stdout)");

    // run
    auto* ru = app.add_subcommand("run", "Full synth -> srp -> infer -> eval pipeline");
    std::string ru_cfg;
    ru->add_option("--config", ru_cfg, "Run configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            return cmd_synth(sy_array, sy_room, sy_t60, sy_src, sy_snr, sy_seed, sy_dry, sy_out,
                             sy_truth, sy_fs, sy_k, sy_ov, sy_seg, sy_sec);
        }
        if (srp->parsed()) {
            return cmd_srp(sr_method, sr_grid, sr_fs, sr_k, sr_ov, sr_array, sr_in, sr_out,
                           sr_feat, sr_threads);
        }
        if (inf->parsed()) return cmd_infer(in_w, in_x, in_out);
        if (ev->parsed()) return cmd_eval(ev_est, ev_truth, ev_vad, ev_grid, ev_out);
        if (co->parsed()) return cmd_cost(co_cfg, co_out);
        if (be->parsed()) {
            const srpedge::RunConfig cfg =
                be_cfg.empty() ? srpedge::RunConfig{} : srpedge::load_config(be_cfg);
            const std::string report = srpedge::bench(cfg);
            if (be_out.empty()) {
                std::cout << report;
            } else {
                std::ofstream f(be_out, std::ios::trunc);
                f << report;
            }
            return 0;
        }
        if (ru->parsed()) {
            const srpedge::PipelineArtifacts art = srpedge::run_pipeline(srpedge::load_config(ru_cfg));
            std::cout << "run: wrote " << art.metrics_path << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const srpedge::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
