#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace srpedge {

struct WavData {
    int sample_rate = 0;
    std::vector<std::vector<double>> channels;  // [channel][sample], amplitudes in +-1
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline void put_u32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}
inline void put_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace detail

// Reads a RIFF/WAVE file holding PCM16 or IEEE float32 samples.
inline WavData read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("wav: cannot open " + path);
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0) {
        throw std::runtime_error("wav: not a RIFF/WAVE file: " + path);
    }
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;
    std::size_t off = 12;
    while (off + 8 <= raw.size()) {
        const char* id = reinterpret_cast<const char*>(raw.data() + off);
        const std::uint32_t len = detail::read_u32(raw.data() + off + 4);
        const unsigned char* body = raw.data() + off + 8;
        if (off + 8 + len > raw.size()) break;
        if (std::memcmp(id, "fmt ", 4) == 0 && len >= 16) {
            format = detail::read_u16(body);
            channels = detail::read_u16(body + 2);
            rate = detail::read_u32(body + 4);
            bits = detail::read_u16(body + 14);
            if (format == 0xFFFE && len >= 40) format = detail::read_u16(body + 24);
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = body;
            data_len = len;
        }
        off += 8 + len + (len & 1);
    }
    if (channels == 0) throw std::runtime_error("wav: zero channels: " + path);
    if (data == nullptr) throw std::runtime_error("wav: missing data chunk: " + path);
    const bool pcm16 = (format == 1 && bits == 16);
    const bool f32 = (format == 3 && bits == 32);
    if (!pcm16 && !f32) {
        throw std::runtime_error("wav: unsupported codec (need PCM16 or float32): " + path);
    }
    const std::size_t bytes_per = bits / 8;
    const std::size_t n = data_len / (bytes_per * channels);
    WavData out;
    out.sample_rate = static_cast<int>(rate);
    out.channels.assign(channels, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            const unsigned char* p = data + (i * channels + ch) * bytes_per;
            if (pcm16) {
                const std::int16_t v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
                out.channels[ch][i] = static_cast<double>(v) / 32768.0;
            } else {
                float v;
                std::memcpy(&v, p, 4);
                out.channels[ch][i] = static_cast<double>(v);
            }
        }
    }
    return out;
}

// Writes IEEE float32 WAVE. Float keeps synthesized scenes bit-reproducible.
inline void write_wav_f32(const std::string& path, const WavData& wav) {
    if (wav.channels.empty()) throw std::runtime_error("wav: nothing to write");
    const std::size_t n = wav.channels[0].size();
    for (const auto& ch : wav.channels) {
        if (ch.size() != n) throw std::runtime_error("wav: channel length mismatch");
    }
    const std::uint16_t channels = static_cast<std::uint16_t>(wav.channels.size());
    const std::uint32_t data_len = static_cast<std::uint32_t>(n * channels * 4);
    std::string s;
    s.reserve(44 + data_len);
    s += "RIFF";
    detail::put_u32(s, 36 + data_len);
    s += "WAVEfmt ";
    detail::put_u32(s, 16);
    detail::put_u16(s, 3);  // IEEE float
    detail::put_u16(s, channels);
    detail::put_u32(s, static_cast<std::uint32_t>(wav.sample_rate));
    detail::put_u32(s, static_cast<std::uint32_t>(wav.sample_rate) * channels * 4);
    detail::put_u16(s, static_cast<std::uint16_t>(channels * 4));
    detail::put_u16(s, 32);
    s += "data";
    detail::put_u32(s, data_len);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            const float v = static_cast<float>(wav.channels[ch][i]);
            char buf[4];
            std::memcpy(buf, &v, 4);
            s.append(buf, 4);
        }
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("wav: cannot write " + path);
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

}  // namespace srpedge
