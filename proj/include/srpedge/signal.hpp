#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "srpedge/fft.hpp"
#include "srpedge/wav.hpp"

namespace srpedge {

struct AudioClip {
    int sample_rate_hz = 0;
    std::vector<std::vector<double>> samples;  // [channel][sample]

    int channel_count() const { return static_cast<int>(samples.size()); }
    std::size_t length() const { return samples.empty() ? 0 : samples[0].size(); }

    void validate() const {
        if (samples.empty()) throw std::invalid_argument("AudioClip: no channels");
        for (const auto& ch : samples) {
            if (ch.size() != samples[0].size()) {
                throw std::invalid_argument("AudioClip: channels differ in length");
            }
        }
        if (sample_rate_hz < 4000) {
            throw std::invalid_argument("AudioClip: sample rate must be >= 4000 Hz");
        }
    }
};

inline AudioClip load_wav(const std::string& path, int min_channels = 2) {
    WavData w = read_wav(path);
    if (static_cast<int>(w.channels.size()) < min_channels) {
        throw std::runtime_error("wav: needs >=" + std::to_string(min_channels) +
                                 " channels: " + path);
    }
    AudioClip clip;
    clip.sample_rate_hz = w.sample_rate;
    clip.samples = std::move(w.channels);
    clip.validate();
    return clip;
}

inline void save_wav(const std::string& path, const AudioClip& clip) {
    WavData w;
    w.sample_rate = clip.sample_rate_hz;
    w.channels = clip.samples;
    write_wav_f32(path, w);
}

enum class WindowKind { kHann, kRect };

struct FrameSpec {
    int window_len = 4096;  // K
    double overlap_ratio = 0.25;
    WindowKind window = WindowKind::kHann;

    int hop() const {
        const double h = window_len * (1.0 - overlap_ratio);
        const int hi = static_cast<int>(std::llround(h));
        if (hi <= 0 || std::abs(h - hi) > 1e-9) {
            throw std::invalid_argument("FrameSpec: hop K*(1-overlap) must be a positive integer");
        }
        return hi;
    }

    void validate() const {
        if (!is_power_of_two(static_cast<std::size_t>(window_len))) {
            throw std::invalid_argument("FrameSpec: window length must be a power of two");
        }
        if (overlap_ratio < 0.0 || overlap_ratio >= 1.0) {
            throw std::invalid_argument("FrameSpec: overlap must be in [0,1)");
        }
        (void)hop();
    }
};

// Symmetric Hann, w[n] = 0.5 - 0.5 cos(2 pi n / (K-1)).
inline std::vector<double> make_window(WindowKind kind, int k) {
    std::vector<double> w(static_cast<std::size_t>(k), 1.0);
    if (kind == WindowKind::kHann) {
        for (int n = 0; n < k; ++n) {
            w[static_cast<std::size_t>(n)] =
                0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / (k - 1));
        }
    }
    return w;
}

inline std::size_t frame_count(std::size_t clip_len, const FrameSpec& spec) {
    if (clip_len < static_cast<std::size_t>(spec.window_len)) return 0;
    return (clip_len - static_cast<std::size_t>(spec.window_len)) /
               static_cast<std::size_t>(spec.hop()) +
           1;
}

// Frames per second of SRP output: fs / (K * (1 - overlap)).
inline double frame_rate_hz(int fs, const FrameSpec& spec) {
    return static_cast<double>(fs) / (spec.window_len * (1.0 - spec.overlap_ratio));
}

// One multi-channel windowed frame, [channel][K].
using WindowedFrame = std::vector<std::vector<double>>;

// Frame t covers samples [t*hop, t*hop + K); trailing partial frames are dropped.
inline std::vector<WindowedFrame> frame_and_window(const AudioClip& clip, const FrameSpec& spec) {
    clip.validate();
    spec.validate();
    const std::size_t k = static_cast<std::size_t>(spec.window_len);
    if (clip.length() < k) {
        throw std::invalid_argument("frame_and_window: clip shorter than one window");
    }
    const std::vector<double> w = make_window(spec.window, spec.window_len);
    const std::size_t hop = static_cast<std::size_t>(spec.hop());
    const std::size_t frames = frame_count(clip.length(), spec);
    std::vector<WindowedFrame> out(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        out[t].assign(static_cast<std::size_t>(clip.channel_count()), std::vector<double>(k));
        for (int ch = 0; ch < clip.channel_count(); ++ch) {
            const double* src = clip.samples[static_cast<std::size_t>(ch)].data() + t * hop;
            double* dst = out[t][static_cast<std::size_t>(ch)].data();
            for (std::size_t n = 0; n < k; ++n) dst[n] = src[n] * w[n];
        }
    }
    return out;
}

struct SpectralFrame {
    int frame_index = 0;
    int k = 0;
    std::vector<std::vector<std::complex<double>>> bins;  // [channel][K/2+1]

    int channel_count() const { return static_cast<int>(bins.size()); }
};

inline SpectralFrame spectral_frame(const WindowedFrame& frame, int frame_index) {
    SpectralFrame sf;
    sf.frame_index = frame_index;
    sf.k = frame.empty() ? 0 : static_cast<int>(frame[0].size());
    sf.bins.reserve(frame.size());
    for (const auto& ch : frame) sf.bins.push_back(rfft(ch));
    return sf;
}

inline std::vector<SpectralFrame> stft(const AudioClip& clip, const FrameSpec& spec) {
    const auto frames = frame_and_window(clip, spec);
    std::vector<SpectralFrame> out;
    out.reserve(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
        out.push_back(spectral_frame(frames[t], static_cast<int>(t)));
    }
    return out;
}

}  // namespace srpedge
