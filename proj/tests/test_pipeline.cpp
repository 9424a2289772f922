#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "srpedge/srpedge.hpp"
#include "test_util.hpp"

using namespace srpedge;

namespace {

std::string temp_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::filesystem::create_directories(p);
    return p.string();
}

std::string file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("config parsing and variant mapping", "[pipeline][config]") {
    const RunConfig c = parse_config_text(R"(
version = 1
grid = 8x16
fs = 16000
k = 4096
overlap = 0.25
method = lc-edge
variant = EM
seed = 7
room = 6,5,4
t60 = 0
snr_db = inf
source = 5.2,3.8,2.2
clip_seconds = 0.5
# comment line
)");
    CHECK(c.res1 == 8);
    CHECK(c.res2 == 16);
    CHECK(c.method == SrpMethod::kLcEdge);
    CHECK(c.variant == ModelVariant::kEdgeMedium);
    CHECK(c.channels() == 16);
    CHECK(c.depthwise());
    CHECK(std::isinf(c.snr_db));

    CHECK(variant_channels(ModelVariant::kBaseline) == 32);
    CHECK_FALSE(variant_depthwise(ModelVariant::kBaseline));
    CHECK(variant_channels(ModelVariant::kEdgeLarge) == 32);
    CHECK(variant_channels(ModelVariant::kEdgeSmall) == 8);
    CHECK(variant_depthwise(ModelVariant::kEdgeSmall));

    CHECK_THROWS_AS(parse_config_text("version = 1\nk = 1000\n"), std::invalid_argument);
    CHECK_THROWS_AS(variant_from_string("huge"), std::invalid_argument);
}

TEST_CASE("pipeline produces all artifacts and a near-truth srp argmax", "[pipeline]") {
    RunConfig cfg;
    cfg.out_dir = temp_dir("srpedge_pipe_a");
    cfg.variant = ModelVariant::kEdgeMedium;
    cfg.method = SrpMethod::kLcEdge;
    cfg.clip_seconds = 0.5;
    cfg.seed = 42;
    const PipelineArtifacts art = run_pipeline(cfg);
    for (const std::string& p : {art.wav_path, art.truth_path, art.srp_path, art.feature_path,
                                 art.doa_path, art.metrics_path}) {
        CHECK(std::filesystem::exists(p));
    }
    // Anechoic scene: the SRP argmax lands within one grid cell of the truth.
    CHECK(art.srp_metrics.rmsae <= 1.5 * build_grid(cfg.res1, cfg.res2).azimuth_step_deg());
    const std::string metrics = file_bytes(art.metrics_path);
    CHECK(metrics.find("\"srp\"") != std::string::npos);
    CHECK(metrics.find("\"net\"") != std::string::npos);
}

TEST_CASE("pipeline outputs are byte-identical across reruns", "[pipeline]") {
    RunConfig cfg;
    cfg.clip_seconds = 0.35;
    cfg.seed = 5;
    cfg.variant = ModelVariant::kEdgeSmall;
    cfg.out_dir = temp_dir("srpedge_pipe_b1");
    const PipelineArtifacts a = run_pipeline(cfg);
    cfg.out_dir = temp_dir("srpedge_pipe_b2");
    const PipelineArtifacts b = run_pipeline(cfg);
    CHECK(file_bytes(a.wav_path) == file_bytes(b.wav_path));
    CHECK(file_bytes(a.srp_path) == file_bytes(b.srp_path));
    CHECK(file_bytes(a.feature_path) == file_bytes(b.feature_path));
    CHECK(file_bytes(a.doa_path) == file_bytes(b.doa_path));
    CHECK(file_bytes(a.metrics_path) == file_bytes(b.metrics_path));
}

TEST_CASE("missing weights surface as a stage-named error", "[pipeline]") {
    RunConfig cfg;
    cfg.out_dir = temp_dir("srpedge_pipe_c");
    cfg.clip_seconds = 0.3;
    cfg.weights_path = "/nonexistent/weights.c3de";
    CHECK_THROWS_WITH(run_pipeline(cfg), Catch::Matchers::ContainsSubstring("infer: weights not found"));
}

TEST_CASE("bench reports per-stage wall time", "[pipeline][bench]") {
    RunConfig cfg;
    cfg.clip_seconds = 0.3;
    cfg.variant = ModelVariant::kEdgeSmall;
    const std::string report = bench(cfg);
    CHECK(report.find("\"stage_seconds\"") != std::string::npos);
    CHECK(report.find("\"synth\"") != std::string::npos);
    CHECK(report.find("\"srp\"") != std::string::npos);
    CHECK(report.find("\"infer\"") != std::string::npos);
    CHECK(report.find("\"srp_frames_per_second\"") != std::string::npos);
}

TEST_CASE("feature tensor file roundtrip through the container", "[pipeline]") {
    SrpFrame f;
    f.res_elevation = 4;
    f.res_azimuth = 8;
    f.power.assign(32, 0.5);
    f.power[9] = 2.0;
    detail::finalize_srp_frame(f);
    const FeatureTensor ft = assemble({f, f});
    RunConfig cfg;
    cfg.res1 = 4;
    cfg.res2 = 8;
    const TensorFile tf = feature_to_tensor_file(ft, cfg);
    const FeatureTensor back = feature_from_tensor_file(tf);
    CHECK(back.time == 2);
    CHECK(back.res_elevation == 4);
    CHECK(back.res_azimuth == 8);
    CHECK(back.at(0, 0, 1, 1) == Catch::Approx(ft.at(0, 0, 1, 1)));
    CHECK(back.at(1, 1, 0, 0) == Catch::Approx(ft.at(1, 1, 0, 0)));
}
