#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "srpedge/signal.hpp"
#include "test_util.hpp"

using namespace srpedge;

namespace {

AudioClip constant_clip(int channels, std::size_t len, double value, int fs = 16000) {
    AudioClip c;
    c.sample_rate_hz = fs;
    c.samples.assign(static_cast<std::size_t>(channels), std::vector<double>(len, value));
    return c;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("frame count follows floor((len-K)/hop)+1", "[signal]") {
    FrameSpec spec;
    spec.window_len = 4096;
    spec.overlap_ratio = 0.25;
    CHECK(spec.hop() == 3072);
    CHECK(frame_count(8192, spec) == 2);
    CHECK(frame_count(160000, spec) == 51);
    CHECK(frame_count(4095, spec) == 0);

    const auto frames = frame_and_window(constant_clip(2, 8192, 1.0), spec);
    CHECK(frames.size() == 2);
}

TEST_CASE("clip shorter than a window is an error", "[signal]") {
    FrameSpec spec;
    spec.window_len = 4096;
    CHECK_THROWS_AS(frame_and_window(constant_clip(2, 1000, 1.0), spec), std::invalid_argument);
}

TEST_CASE("rect window is the identity, Hann starts at zero", "[signal]") {
    FrameSpec rect;
    rect.window_len = 256;
    rect.overlap_ratio = 0.5;
    rect.window = WindowKind::kRect;
    const auto rf = frame_and_window(constant_clip(2, 512, 1.0), rect);
    for (const auto& ch : rf[0]) {
        for (double v : ch) CHECK(v == 1.0);
    }

    FrameSpec hann = rect;
    hann.window = WindowKind::kHann;
    const auto hf = frame_and_window(constant_clip(2, 512, 1.0), hann);
    CHECK(hf[0][0][0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(hf[0][0][255] == Catch::Approx(0.0).margin(1e-12));

    double raw = 256.0, windowed = 0.0;
    for (double v : hf[0][0]) windowed += v * v;
    CHECK(windowed <= raw);
}

TEST_CASE("frame spec validation", "[signal]") {
    FrameSpec bad;
    bad.window_len = 1000;  // not a power of two
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    FrameSpec bad_hop;
    bad_hop.window_len = 256;
    bad_hop.overlap_ratio = 0.3;  // hop 179.2
    CHECK_THROWS_AS(bad_hop.validate(), std::invalid_argument);
}

TEST_CASE("frame rate formula", "[signal]") {
    FrameSpec spec;
    spec.window_len = 4096;
    spec.overlap_ratio = 0.25;
    CHECK(frame_rate_hz(16000, spec) == Catch::Approx(5.2083333).epsilon(1e-6));
}

TEST_CASE("float32 wav roundtrip", "[signal][wav]") {
    AudioClip clip = constant_clip(3, 1000, 0.0);
    clip.samples[0] = testutil::random_signal(1000, 5);
    clip.samples[1] = testutil::random_signal(1000, 6);
    clip.samples[2] = testutil::random_signal(1000, 7);
    const std::string path = temp_path("srpedge_roundtrip.wav");
    save_wav(path, clip);
    const AudioClip back = load_wav(path, 3);
    REQUIRE(back.channel_count() == 3);
    REQUIRE(back.length() == 1000);
    CHECK(back.sample_rate_hz == 16000);
    for (int ch = 0; ch < 3; ++ch) {
        for (std::size_t i = 0; i < 1000; ++i) {
            CHECK(back.samples[static_cast<std::size_t>(ch)][i] ==
                  Catch::Approx(clip.samples[static_cast<std::size_t>(ch)][i]).margin(1e-6));
        }
    }
    std::remove(path.c_str());
}

TEST_CASE("pcm16 scaling and channel-count guard", "[signal][wav]") {
    // Hand-built 2-channel PCM16 file, one frame: L = 32767, R = -32768.
    std::string bytes = "RIFF";
    auto u32 = [&bytes](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    auto u16 = [&bytes](std::uint16_t v) {
        bytes.push_back(static_cast<char>(v & 0xff));
        bytes.push_back(static_cast<char>(v >> 8));
    };
    u32(36 + 4);
    bytes += "WAVEfmt ";
    u32(16);
    u16(1);      // PCM
    u16(2);      // channels
    u32(16000);  // rate
    u32(16000 * 4);
    u16(4);
    u16(16);
    bytes += "data";
    u32(4);
    u16(0x7FFF);
    u16(0x8000);
    const std::string path = temp_path("srpedge_pcm16.wav");
    {
        std::ofstream f(path, std::ios::binary);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    const AudioClip clip = load_wav(path);
    CHECK(clip.samples[0][0] == Catch::Approx(32767.0 / 32768.0).margin(1e-12));
    CHECK(clip.samples[1][0] == Catch::Approx(-1.0).margin(1e-12));
    CHECK_THROWS_WITH(load_wav(path, 3), Catch::Matchers::ContainsSubstring(">=3 channels"));
    std::remove(path.c_str());
}

TEST_CASE("stft yields real DC and Nyquist bins per channel", "[signal]") {
    AudioClip clip = constant_clip(2, 600, 0.0);
    clip.samples[0] = testutil::random_signal(600, 11);
    clip.samples[1] = testutil::random_signal(600, 12);
    FrameSpec spec;
    spec.window_len = 512;
    spec.overlap_ratio = 0.5;
    const auto frames = stft(clip, spec);
    REQUIRE(frames.size() == 1);
    for (const auto& ch : frames[0].bins) {
        CHECK(ch[0].imag() == 0.0);
        CHECK(ch.back().imag() == 0.0);
    }
}
