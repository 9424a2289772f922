#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "srpedge/net.hpp"
#include "srpedge/tensor_io.hpp"

using namespace srpedge;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("weight bundle roundtrips byte-identically", "[tensor_io]") {
    const NetworkGraph g = build_graph(4, 8, 8, true);
    const WeightBundle w = make_random_weights(g, 99);
    const auto bytes1 = w.serialize();
    const std::string path = temp_path("srpedge_weights.c3de");
    save_weights(path, w);
    const WeightBundle back = load_weights(path);
    const auto bytes2 = back.serialize();
    CHECK(bytes1 == bytes2);
    REQUIRE(back.tensors.size() == w.tensors.size());
    for (std::size_t i = 0; i < w.tensors.size(); ++i) {
        CHECK(back.tensors[i].name == w.tensors[i].name);
        CHECK(back.tensors[i].data == w.tensors[i].data);
    }
    std::remove(path.c_str());
}

TEST_CASE("truncated files fail the checksum", "[tensor_io]") {
    const NetworkGraph g = build_graph(4, 8, 8, true);
    const WeightBundle w = make_random_weights(g, 1);
    auto bytes = w.serialize();
    bytes.resize(bytes.size() - 9);
    CHECK_THROWS_WITH(TensorFile::parse(bytes),
                      Catch::Matchers::ContainsSubstring("checksum mismatch"));
}

TEST_CASE("corrupted payload fails the checksum", "[tensor_io]") {
    const NetworkGraph g = build_graph(4, 8, 8, true);
    auto bytes = make_random_weights(g, 1).serialize();
    bytes[bytes.size() / 2] ^= 0x5A;
    CHECK_THROWS_WITH(TensorFile::parse(bytes),
                      Catch::Matchers::ContainsSubstring("checksum mismatch"));
}

TEST_CASE("version mismatches are reported", "[tensor_io]") {
    const NetworkGraph g = build_graph(4, 8, 8, true);
    WeightBundle w = make_random_weights(g, 1);
    w.version = 2;
    const auto bytes = w.serialize();
    CHECK_THROWS_WITH(TensorFile::parse(bytes),
                      Catch::Matchers::ContainsSubstring("unsupported version"));
}

TEST_CASE("config mismatch between bundle and graph is a shape error", "[tensor_io]") {
    const NetworkGraph g32 = build_graph(8, 16, 32, true);
    const NetworkGraph g16 = build_graph(8, 16, 16, true);
    const WeightBundle w = make_random_weights(g32, 5);
    CHECK_THROWS_WITH(validate_weights(g16, w),
                      Catch::Matchers::ContainsSubstring("shape error"));
}

TEST_CASE("crc32 matches the reference value", "[tensor_io]") {
    const char* s = "123456789";
    CHECK(crc32(reinterpret_cast<const unsigned char*>(s), 9) == 0xCBF43926u);
}
