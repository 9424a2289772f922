#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "srpedge/fft.hpp"
#include "srpedge/geometry.hpp"
#include "srpedge/signal.hpp"

namespace srpedge {

struct TrajectorySegment {
    Vec3 position;       // meters, absolute room coordinates
    double duration_s = 0.0;
};

// Shoebox scene: piecewise-static source, uniform wall absorption derived
// from the T60 target, white noise mixed at a fixed SNR.
struct Scene {
    Vec3 room_dims{6.0, 5.0, 4.0};
    double t60_s = 0.0;  // 0 = anechoic
    double snr_db = std::numeric_limits<double>::infinity();
    Vec3 array_center{3.0, 2.5, 1.7};
    std::vector<TrajectorySegment> trajectory;
    std::uint64_t seed = 1;

    void validate() const {
        if (room_dims.x <= 0 || room_dims.y <= 0 || room_dims.z <= 0) {
            throw std::invalid_argument("scene: room dimensions must be positive");
        }
        if (trajectory.empty()) throw std::invalid_argument("scene: no source trajectory");
        auto inside = [&](const Vec3& p) {
            return p.x >= 0.1 * room_dims.x && p.x <= 0.9 * room_dims.x &&
                   p.y >= 0.1 * room_dims.y && p.y <= 0.9 * room_dims.y &&
                   p.z >= 0.1 * room_dims.z && p.z <= 0.9 * room_dims.z;
        };
        if (!inside(array_center)) {
            throw std::invalid_argument("scene: array outside the 0.1-margin room interior");
        }
        for (const auto& seg : trajectory) {
            if (!inside(seg.position)) {
                throw std::invalid_argument("scene: source outside the 0.1-margin room interior");
            }
            if ((seg.position - array_center).norm() < 1.0) {
                throw std::invalid_argument(
                    "scene: source closer than 1.0 m to the array (far-field guard)");
            }
            if (seg.duration_s <= 0.0) {
                throw std::invalid_argument("scene: segment duration must be positive");
            }
        }
    }
};

// Sabine reflection coefficient for a uniform-absorption shoebox.
inline double reflection_coefficient(const Vec3& room, double t60_s) {
    if (t60_s <= 0.0) return 0.0;
    const double volume = room.x * room.y * room.z;
    const double surface = 2.0 * (room.x * room.y + room.x * room.z + room.y * room.z);
    const double alpha = 0.161 * volume / (surface * t60_s);
    if (alpha >= 1.0) {
        throw std::invalid_argument("scene: T60 target unreachably short for this room");
    }
    return std::sqrt(1.0 - alpha);
}

struct Rir {
    int fs = 0;
    std::vector<double> taps;
};

namespace detail {

constexpr int kFracTaps = 81;  // Hann-windowed sinc for sub-sample delays

inline double plain_sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

inline void add_fractional_tap(std::vector<double>& h, double delay_samples, double gain) {
    const int center = static_cast<int>(std::floor(delay_samples));
    const double frac = delay_samples - center;
    const int half = kFracTaps / 2;
    for (int n = -half; n <= half; ++n) {
        const int idx = center + n;
        if (idx < 0 || idx >= static_cast<int>(h.size())) continue;
        const double u = static_cast<double>(n) - frac;
        const double w =
            0.5 + 0.5 * std::cos(std::numbers::pi * (u) / (half + 1.0));
        if (std::abs(u) > half + 1.0) continue;
        h[static_cast<std::size_t>(idx)] += gain * w * plain_sinc(u);
    }
}

}  // namespace detail

// Allen-Berkley image source method for one microphone, uniform beta on all
// six surfaces, fractional delays realized with windowed-sinc taps.
inline Rir ism_rir(const Vec3& room, double beta, const Vec3& source, const Vec3& mic, int fs,
                   int length, int max_order, double c = 343.0) {
    if (max_order < 0) throw std::invalid_argument("ism_rir: max_order must be >= 0");
    if (length <= 0) throw std::invalid_argument("ism_rir: length must be positive");
    Rir rir;
    rir.fs = fs;
    rir.taps.assign(static_cast<std::size_t>(length), 0.0);
    const double max_dist = (length + detail::kFracTaps) * c / fs;
    const int n1 = static_cast<int>(std::ceil(max_dist / (2.0 * room.x)));
    const int n2 = static_cast<int>(std::ceil(max_dist / (2.0 * room.y)));
    const int n3 = static_cast<int>(std::ceil(max_dist / (2.0 * room.z)));
    for (int mx = -n1; mx <= n1; ++mx) {
        for (int my = -n2; my <= n2; ++my) {
            for (int mz = -n3; mz <= n3; ++mz) {
                for (int qx = 0; qx <= 1; ++qx) {
                    for (int qy = 0; qy <= 1; ++qy) {
                        for (int qz = 0; qz <= 1; ++qz) {
                            const int order = std::abs(2 * mx - qx) + std::abs(2 * my - qy) +
                                              std::abs(2 * mz - qz);
                            if (order > max_order) continue;
                            const Vec3 img{(1 - 2 * qx) * source.x + 2 * mx * room.x,
                                           (1 - 2 * qy) * source.y + 2 * my * room.y,
                                           (1 - 2 * qz) * source.z + 2 * mz * room.z};
                            const double dist = (img - mic).norm();
                            const double delay = dist / c * fs;
                            if (delay >= length + detail::kFracTaps / 2) continue;
                            const int reflections = std::abs(mx - qx) + std::abs(mx) +
                                                    std::abs(my - qy) + std::abs(my) +
                                                    std::abs(mz - qz) + std::abs(mz);
                            const double gain =
                                std::pow(beta, reflections) / (4.0 * std::numbers::pi * dist);
                            detail::add_fractional_tap(rir.taps, delay, gain);
                        }
                    }
                }
            }
        }
    }
    return rir;
}

// Plane-wave multichannel rendering: channel m gets the dry signal delayed by
// -dot(direction, pos_m)/c, no attenuation differences. Delay applied in the
// frequency domain for sub-sample accuracy.
inline AudioClip anechoic_far_field(const Vec3& direction, const std::vector<double>& dry,
                                    const MicArray& array, int fs) {
    if (std::abs(direction.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("anechoic_far_field: direction must be a unit vector");
    }
    array.validate();
    const std::size_t n = dry.size();
    std::size_t padded = 1;
    while (padded < n + 256) padded <<= 1;
    std::vector<double> buf(padded, 0.0);
    std::copy(dry.begin(), dry.end(), buf.begin());
    const std::vector<std::complex<double>> spec = rfft(buf);
    AudioClip clip;
    clip.sample_rate_hz = fs;
    for (const Vec3& pos : array.positions) {
        const double delay = -direction.dot(pos) / array.speed_of_sound * fs;  // samples
        std::vector<std::complex<double>> shifted(spec.size());
        for (std::size_t k = 0; k < spec.size(); ++k) {
            const double phase =
                -2.0 * std::numbers::pi * static_cast<double>(k) * delay / padded;
            shifted[k] = spec[k] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        shifted[0] = {shifted[0].real(), 0.0};
        shifted.back() = {shifted.back().real(), 0.0};
        std::vector<double> ch = irfft(shifted, padded);
        ch.resize(n);
        clip.samples.push_back(std::move(ch));
    }
    return clip;
}

// Adds seeded white Gaussian noise per channel so the clip-wide SNR matches
// snr_db exactly (measured over the generated noise, then rescaled).
inline AudioClip mix_at_snr(const AudioClip& signal, double snr_db, std::uint64_t seed) {
    signal.validate();
    if (std::isinf(snr_db) && snr_db > 0) return signal;
    double p_signal = 0.0;
    std::size_t count = 0;
    for (const auto& ch : signal.samples) {
        for (double v : ch) p_signal += v * v;
        count += ch.size();
    }
    p_signal /= static_cast<double>(count);
    if (p_signal <= 0.0) throw std::invalid_argument("mix_at_snr: zero-power signal");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<std::vector<double>> noise(signal.samples.size());
    double p_noise = 0.0;
    for (std::size_t ch = 0; ch < noise.size(); ++ch) {
        noise[ch].resize(signal.length());
        for (auto& v : noise[ch]) {
            v = dist(rng);
            p_noise += v * v;
        }
    }
    p_noise /= static_cast<double>(count);
    const double target = p_signal * std::pow(10.0, -snr_db / 10.0);
    const double scale = std::sqrt(target / p_noise);
    AudioClip out = signal;
    for (std::size_t ch = 0; ch < noise.size(); ++ch) {
        for (std::size_t i = 0; i < out.samples[ch].size(); ++i) {
            out.samples[ch][i] += scale * noise[ch][i];
        }
    }
    return out;
}

// Rendered scene plus per-sample source position for ground truth.
struct RenderedScene {
    AudioClip clip;
    std::vector<Vec3> source_at_sample;
};

// Convolves the dry signal with per-segment RIRs; consecutive segments are
// crossfaded over 10 ms. RIR length follows the T60 target.
inline RenderedScene render_scene(const Scene& scene, const MicArray& array,
                                  const std::vector<double>& dry, int fs, int max_order = 24) {
    scene.validate();
    array.validate();
    const double beta = reflection_coefficient(scene.room_dims, scene.t60_s);
    const int rir_len =
        std::max(detail::kFracTaps * 2, static_cast<int>(std::ceil(scene.t60_s * fs * 1.1)));
    const std::size_t n = dry.size();
    const std::size_t fade = static_cast<std::size_t>(0.010 * fs);

    RenderedScene out;
    out.clip.sample_rate_hz = fs;
    out.clip.samples.assign(static_cast<std::size_t>(array.mic_count()),
                            std::vector<double>(n, 0.0));
    out.source_at_sample.assign(n, scene.trajectory.front().position);

    std::size_t start = 0;
    for (std::size_t s = 0; s < scene.trajectory.size() && start < n; ++s) {
        const auto& seg = scene.trajectory[s];
        std::size_t seg_len = static_cast<std::size_t>(seg.duration_s * fs);
        if (s + 1 == scene.trajectory.size()) seg_len = n - start;  // last segment absorbs the rest
        const std::size_t end = std::min(n, start + seg_len);
        const std::size_t lead = (s == 0) ? 0 : fade;  // overlap into the previous segment
        const std::size_t from = start - std::min(start, lead);
        std::vector<double> piece(dry.begin() + static_cast<std::ptrdiff_t>(from),
                                  dry.begin() + static_cast<std::ptrdiff_t>(end));
        for (int m = 0; m < array.mic_count(); ++m) {
            const Vec3 mic = scene.array_center + array.positions[static_cast<std::size_t>(m)];
            const Rir rir = ism_rir(scene.room_dims, beta, seg.position, mic, fs, rir_len,
                                    scene.t60_s <= 0.0 ? 0 : max_order, array.speed_of_sound);
            const std::vector<double> wet = fft_convolve(piece, rir.taps);
            auto& dst = out.clip.samples[static_cast<std::size_t>(m)];
            for (std::size_t i = 0; i < wet.size(); ++i) {
                const std::size_t idx = from + i;
                if (idx >= n) break;
                if (idx < start) {  // crossfade ramp-in over the previous segment's tail
                    const double w = static_cast<double>(i + 1) / static_cast<double>(lead + 1);
                    dst[idx] = dst[idx] * (1.0 - w) + wet[i] * w;
                } else if (s + 1 < scene.trajectory.size() && idx >= end) {
                    break;  // the next segment ramps in over [end-fade, end)
                } else {
                    dst[idx] += wet[i];
                }
            }
        }
        for (std::size_t i = start; i < end; ++i) out.source_at_sample[i] = seg.position;
        start = end;
    }
    if (std::isfinite(scene.snr_db)) {
        out.clip = mix_at_snr(out.clip, scene.snr_db, scene.seed);
    }
    return out;
}

// Ground-truth DOA (degrees) of the active source at each frame center.
struct FrameTruth {
    int frame_index = 0;
    double elevation_deg = 0.0;
    double azimuth_deg = 0.0;
};

inline std::vector<FrameTruth> frame_truth(const RenderedScene& scene, const Vec3& array_center,
                                           const FrameSpec& spec) {
    std::vector<FrameTruth> out;
    const std::size_t hop = static_cast<std::size_t>(spec.hop());
    const std::size_t k = static_cast<std::size_t>(spec.window_len);
    const std::size_t frames = frame_count(scene.clip.length(), spec);
    for (std::size_t t = 0; t < frames; ++t) {
        const std::size_t center = t * hop + k / 2;
        const Vec3 d = (scene.source_at_sample[std::min(center, scene.source_at_sample.size() - 1)] -
                        array_center)
                           .normalized();
        FrameTruth ft;
        ft.frame_index = static_cast<int>(t);
        ft.elevation_deg = std::asin(std::clamp(d.z, -1.0, 1.0)) * 180.0 / std::numbers::pi;
        ft.azimuth_deg = std::atan2(d.y, d.x) * 180.0 / std::numbers::pi;
        if (ft.azimuth_deg < 0) ft.azimuth_deg += 360.0;
        out.push_back(ft);
    }
    return out;
}

// Seeded white-noise dry signal for pipeline runs without external audio.
inline std::vector<double> make_noise_dry(std::size_t length, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 0.25);
    std::vector<double> out(length);
    for (auto& v : out) v = dist(rng);
    return out;
}

}  // namespace srpedge
