#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace srpedge {

inline std::uint32_t crc32(const unsigned char* data, std::size_t len) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int b = 0; b < 8; ++b) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) {
        crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

// Binary tensor container shared by network weights, feature tensors and SRP
// map dumps: magic "C3DE", version, config echo, named float32 tensors,
// trailing CRC32 over everything before it. Little-endian throughout.
struct TensorEntry {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t element_count() const {
        std::size_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
};

struct TensorFile {
    static constexpr std::uint32_t kVersion = 1;

    std::uint32_t version = kVersion;
    std::uint32_t res1 = 0, res2 = 0, channels = 0;
    std::uint8_t depthwise = 0;
    std::vector<TensorEntry> tensors;

    const TensorEntry* find(const std::string& name) const {
        for (const auto& t : tensors) {
            if (t.name == name) return &t;
        }
        return nullptr;
    }

    std::vector<unsigned char> serialize() const {
        std::vector<unsigned char> out;
        auto u32 = [&out](std::uint32_t v) {
            for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
        };
        auto u16 = [&out](std::uint16_t v) {
            out.push_back(static_cast<unsigned char>(v & 0xff));
            out.push_back(static_cast<unsigned char>(v >> 8));
        };
        out.insert(out.end(), {'C', '3', 'D', 'E'});
        u32(version);
        u32(res1);
        u32(res2);
        u32(channels);
        out.push_back(depthwise);
        u32(static_cast<std::uint32_t>(tensors.size()));
        for (const auto& t : tensors) {
            u16(static_cast<std::uint16_t>(t.name.size()));
            out.insert(out.end(), t.name.begin(), t.name.end());
            out.push_back(0);  // dtype: float32
            out.push_back(static_cast<unsigned char>(t.dims.size()));
            for (auto d : t.dims) u32(d);
            if (t.data.size() != t.element_count()) {
                throw std::runtime_error("tensor_io: tensor " + t.name + " size/dims mismatch");
            }
            const std::size_t bytes = t.data.size() * 4;
            const std::size_t off = out.size();
            out.resize(off + bytes);
            std::memcpy(out.data() + off, t.data.data(), bytes);
        }
        u32(crc32(out.data(), out.size()));
        return out;
    }

    void write(const std::string& path) const {
        const std::vector<unsigned char> bytes = serialize();
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("tensor_io: cannot write " + path);
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
    }

    static TensorFile parse(const std::vector<unsigned char>& raw) {
        if (raw.size() < 4 || std::memcmp(raw.data(), "C3DE", 4) != 0) {
            throw std::runtime_error("tensor_io: bad magic");
        }
        if (raw.size() < 27) throw std::runtime_error("tensor_io: checksum mismatch (truncated)");
        std::uint32_t stored;
        std::memcpy(&stored, raw.data() + raw.size() - 4, 4);
        if (crc32(raw.data(), raw.size() - 4) != stored) {
            throw std::runtime_error("tensor_io: checksum mismatch");
        }
        std::size_t off = 4;
        auto u32 = [&raw, &off]() {
            if (off + 4 > raw.size()) throw std::runtime_error("tensor_io: short read");
            std::uint32_t v;
            std::memcpy(&v, raw.data() + off, 4);
            off += 4;
            return v;
        };
        auto u16 = [&raw, &off]() {
            if (off + 2 > raw.size()) throw std::runtime_error("tensor_io: short read");
            const std::uint16_t v = static_cast<std::uint16_t>(raw[off] | (raw[off + 1] << 8));
            off += 2;
            return v;
        };
        auto u8 = [&raw, &off]() {
            if (off + 1 > raw.size()) throw std::runtime_error("tensor_io: short read");
            return raw[off++];
        };
        TensorFile tf;
        tf.version = u32();
        if (tf.version != kVersion) {
            throw std::runtime_error("tensor_io: unsupported version " +
                                     std::to_string(tf.version));
        }
        tf.res1 = u32();
        tf.res2 = u32();
        tf.channels = u32();
        tf.depthwise = u8();
        const std::uint32_t count = u32();
        for (std::uint32_t i = 0; i < count; ++i) {
            TensorEntry t;
            const std::uint16_t name_len = u16();
            if (off + name_len > raw.size()) throw std::runtime_error("tensor_io: short read");
            t.name.assign(reinterpret_cast<const char*>(raw.data() + off), name_len);
            off += name_len;
            const std::uint8_t dtype = u8();
            if (dtype != 0) throw std::runtime_error("tensor_io: unsupported dtype");
            const std::uint8_t rank = u8();
            for (std::uint8_t r = 0; r < rank; ++r) t.dims.push_back(u32());
            const std::size_t bytes = t.element_count() * 4;
            if (off + bytes > raw.size()) throw std::runtime_error("tensor_io: short read");
            t.data.resize(t.element_count());
            std::memcpy(t.data.data(), raw.data() + off, bytes);
            off += bytes;
            tf.tensors.push_back(std::move(t));
        }
        return tf;
    }

    static TensorFile read(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("tensor_io: cannot open " + path);
        std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                       std::istreambuf_iterator<char>());
        return parse(raw);
    }
};

}  // namespace srpedge
