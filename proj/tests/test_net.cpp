#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "srpedge/net.hpp"
#include "test_util.hpp"

using namespace srpedge;

namespace {

FeatureTensor random_feature(int time, int res1, int res2, std::uint64_t seed) {
    FeatureTensor ft;
    ft.time = time;
    ft.res_elevation = res1;
    ft.res_azimuth = res2;
    ft.data.resize(3 * static_cast<std::size_t>(time) * ft.spatial_size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& v : ft.data) v = dist(rng);
    return ft;
}

long long layer_param_by_name(const NetworkGraph& g, const std::string& name) {
    for (const auto& [n, p] : count_params(g).per_layer) {
        if (n == name) return p;
    }
    return -1;
}

}  // namespace

TEST_CASE("branch depth follows min(4, log2(min(res)))", "[net]") {
    CHECK(build_graph(8, 16, 32, false).depth == 3);
    CHECK(build_graph(4, 8, 16, true).depth == 2);
    CHECK(build_graph(32, 64, 8, true).depth == 4);
    CHECK_THROWS_AS(build_graph(6, 16, 32, false), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(8, 1, 32, false), std::invalid_argument);
}

TEST_CASE("branch pooling yields the documented concat width", "[net]") {
    const NetworkGraph g = build_graph(8, 16, 32, false);
    CHECK(g.branch_a.back().out_el == 8);
    CHECK(g.branch_a.back().out_az == 2);
    CHECK(g.branch_b.back().out_el == 1);
    CHECK(g.branch_b.back().out_az == 16);
    CHECK(g.concat_channels == 1024);  // 32*8*2 + 32*1*16
}

TEST_CASE("parameter counts match the closed forms", "[net]") {
    const NetworkGraph g = build_graph(8, 16, 32, false);
    CHECK(layer_param_by_name(g, "input_conv") == 12032);   // 3*32*125 + 32
    CHECK(layer_param_by_name(g, "branch_a.2.conv") == 46112);  // 32*32*45 + 32
    const ParamCount pc = count_params(g);

    const WeightBundle w = make_random_weights(g, 3);
    long long elements = 0;
    for (const auto& t : w.tensors) elements += static_cast<long long>(t.element_count());
    CHECK(elements == pc.total);
}

TEST_CASE("average weight reductions of the edge variants", "[net]") {
    const std::vector<std::pair<int, int>> res{{4, 8}, {8, 16}, {16, 32}, {32, 64}};
    auto avg_reduction = [&res](int c) {
        double acc = 0.0;
        for (const auto& [r1, r2] : res) {
            const double base = static_cast<double>(count_params(build_graph(r1, r2, 32, false)).total);
            const double edge = static_cast<double>(count_params(build_graph(r1, r2, c, true)).total);
            acc += (base - edge) / base * 100.0;
        }
        return acc / static_cast<double>(res.size());
    };
    CHECK(avg_reduction(32) == Catch::Approx(59.77).margin(2.0));  // EL
    CHECK(avg_reduction(16) == Catch::Approx(86.74).margin(2.0));  // EM
    CHECK(avg_reduction(8) == Catch::Approx(94.66).margin(2.0));   // ES
}

TEST_CASE("flop counts match the closed forms", "[net]") {
    LayerSpec one;
    one.kind = LayerKind::kConv3dCausal;
    one.in_ch = 3;
    one.out_ch = 32;
    one.kt = one.ke = one.ka = 5;
    one.out_el = one.out_az = 1;
    CHECK(layer_flops(one) == 24000);  // 2 * 32 * 3 * 125

    // Cross-conv work scales ~quadratically with C.
    const long long f16 = count_flops(build_graph(8, 16, 16, false)).total;
    const long long f32 = count_flops(build_graph(8, 16, 32, false)).total;
    auto branch_only = [](const NetworkGraph& g) {
        long long s = 0;
        for (const auto& l : g.branch_a) {
            if (l.kind == LayerKind::kConv3dCausal && l.in_ch == l.out_ch) s += layer_flops(l);
        }
        return s;
    };
    const long long b16 = branch_only(build_graph(8, 16, 16, false));
    const long long b32 = branch_only(build_graph(8, 16, 32, false));
    CHECK(static_cast<double>(b32) / static_cast<double>(b16) == Catch::Approx(4.0).margin(0.01));
    CHECK(f32 > f16);
}

TEST_CASE("depthwise substitution only changes the first head layer", "[net]") {
    const NetworkGraph dense = build_graph(8, 16, 16, false);
    const NetworkGraph dw = build_graph(8, 16, 16, true);
    const ParamCount pd = count_params(dense);
    const ParamCount pw = count_params(dw);
    REQUIRE(pd.per_layer.size() == pw.per_layer.size());
    for (std::size_t i = 0; i < pd.per_layer.size(); ++i) {
        if (pd.per_layer[i].first == "head_conv1") {
            CHECK(pd.per_layer[i].second != pw.per_layer[i].second);
        } else {
            CHECK(pd.per_layer[i].second == pw.per_layer[i].second);
        }
    }
}

TEST_CASE("zero weights map any input to zero", "[net]") {
    const NetworkGraph g = build_graph(4, 8, 8, true);
    WeightBundle w = make_random_weights(g, 1);
    for (auto& t : w.tensors) {
        for (auto& v : t.data) v = 0.0f;
    }
    const auto out = infer(g, w, random_feature(4, 4, 8, 2));
    for (const auto& row : out) {
        CHECK(row[0] == 0.0);
        CHECK(row[1] == 0.0);
        CHECK(row[2] == 0.0);
    }
}

TEST_CASE("bias-free network with unit prelu slopes is homogeneous", "[net]") {
    const NetworkGraph g = build_graph(4, 8, 8, false);
    WeightBundle w = make_random_weights(g, 4);
    for (auto& t : w.tensors) {
        if (t.name.find("bias") != std::string::npos) {
            for (auto& v : t.data) v = 0.0f;
        }
        if (t.name.find("alpha") != std::string::npos) {
            for (auto& v : t.data) v = 1.0f;
        }
    }
    const FeatureTensor x = random_feature(3, 4, 8, 5);
    FeatureTensor ax = x;
    const double alpha = 2.5;
    for (auto& v : ax.data) v *= alpha;
    const auto y = infer(g, w, x);
    const auto ay = infer(g, w, ax);
    for (std::size_t t = 0; t < y.size(); ++t) {
        for (int c = 0; c < 3; ++c) {
            CHECK(ay[t][c] == Catch::Approx(alpha * y[t][c]).epsilon(1e-9));
        }
    }
}

TEST_CASE("output length equals input length", "[net]") {
    const NetworkGraph g = build_graph(4, 8, 16, true);
    const WeightBundle w = make_random_weights(g, 6);
    for (int t : {1, 7, 23}) {
        CHECK(infer(g, w, random_feature(t, 4, 8, 7)).size() == static_cast<std::size_t>(t));
    }
}

TEST_CASE("outputs before a perturbation are bit-identical", "[net][causality]") {
    const NetworkGraph g = build_graph(4, 8, 8, true);
    const WeightBundle w = make_random_weights(g, 8);
    const FeatureTensor x = random_feature(10, 4, 8, 9);
    FeatureTensor xp = x;
    const int t0 = 6;
    for (int c = 0; c < 3; ++c) {
        for (int e = 0; e < 4; ++e) {
            for (int a = 0; a < 8; ++a) xp.data[xp.index(c, t0, e, a)] += 3.0;
        }
    }
    const auto y = infer(g, w, x);
    const auto yp = infer(g, w, xp);
    for (int t = 0; t < t0; ++t) {
        for (int c = 0; c < 3; ++c) CHECK(y[static_cast<std::size_t>(t)][c] == yp[static_cast<std::size_t>(t)][c]);
    }
    bool changed = false;
    for (std::size_t t = static_cast<std::size_t>(t0); t < y.size(); ++t) {
        for (int c = 0; c < 3; ++c) changed |= y[t][c] != yp[t][c];
    }
    CHECK(changed);
}

TEST_CASE("streaming inference matches whole-sequence inference", "[net][streaming]") {
    for (bool dw : {false, true}) {
        const NetworkGraph g = build_graph(4, 8, 8, dw);
        const WeightBundle w = make_random_weights(g, 10);
        const FeatureTensor x = random_feature(12, 4, 8, 11 + (dw ? 1 : 0));
        const auto batch = infer(g, w, x);
        StreamingEngine eng(g, w);
        std::vector<double> frame(3 * x.spatial_size());
        for (int t = 0; t < x.time; ++t) {
            for (int c = 0; c < 3; ++c) {
                for (int e = 0; e < 4; ++e) {
                    for (int a = 0; a < 8; ++a) {
                        frame[(static_cast<std::size_t>(c) * 4 + e) * 8 + a] = x.at(c, t, e, a);
                    }
                }
            }
            const auto y = eng.push(frame);
            for (int c = 0; c < 3; ++c) {
                CHECK(std::abs(y[c] - batch[static_cast<std::size_t>(t)][c]) <= 1e-6);
            }
        }
    }
}

TEST_CASE("prelu endpoints: slope 0 is relu, slope 1 is identity", "[net]") {
    LayerSpec l;
    l.kind = LayerKind::kPrelu;
    l.in_ch = l.out_ch = 2;
    l.in_el = l.in_az = 1;
    std::vector<double> v{-2.0, 3.0};
    std::vector<double> relu = v;
    const double zeros[2] = {0.0, 0.0};
    detail::prelu_inplace(l, zeros, relu);
    CHECK(relu[0] == 0.0);
    CHECK(relu[1] == 3.0);
    std::vector<double> ident = v;
    const double ones[2] = {1.0, 1.0};
    detail::prelu_inplace(l, ones, ident);
    CHECK(ident[0] == -2.0);
    CHECK(ident[1] == 3.0);
}

TEST_CASE("feature tensor resolution must match the graph", "[net]") {
    const NetworkGraph g = build_graph(8, 16, 8, true);
    const WeightBundle w = make_random_weights(g, 12);
    CHECK_THROWS_AS(infer(g, w, random_feature(2, 4, 8, 13)), std::invalid_argument);
}

TEST_CASE("causal buffer sizing follows the history-length rule", "[net]") {
    const NetworkGraph g = build_graph(8, 16, 16, true);
    CHECK(g.head_conv1.history_len() == 9);  // kt 5, dilation 2
    LayerSpec plain;
    plain.kt = 5;
    plain.dilation = 1;
    CHECK(plain.history_len() == 5);
    // input 5*3S + trunk 5*32S + branch buffers + concat 9F + head 9*4C
    const long long s = 128;
    const long long expect = 5 * 3 * s + 5 * 32 * s +
                             2 * (5 * 16 * s / 2 + 5 * 16 * s / 4) + 9 * 512 + 9 * 64;
    CHECK(causal_buffer_values(g) == expect);
}
