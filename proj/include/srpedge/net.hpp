#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srpedge/feature.hpp"
#include "srpedge/tensor_io.hpp"

namespace srpedge {

enum class LayerKind { kConv3dCausal, kPrelu, kMaxPool3d, kFlattenConcat, kConv1dCausalDilated };

struct LayerSpec {
    LayerKind kind = LayerKind::kConv3dCausal;
    std::string name;
    int in_ch = 0, out_ch = 0;
    int kt = 1, ke = 1, ka = 1;
    int dilation = 1;
    int pool_e = 1, pool_a = 1;
    bool depthwise_separable = false;
    int in_el = 1, in_az = 1;  // spatial extent entering the layer
    int out_el = 1, out_az = 1;

    int history_len() const { return (kt - 1) * dilation + 1; }
};

// Cross-shaped causal CNN: a shared 3D input convolution, two pooling
// branches (azimuth / elevation), flatten-concat, and a dilated 1D head that
// emits per-frame xyz. `channels` scales the branch convolutions; the input
// convolution keeps 32 filters and the first head layer keeps the 4:1 ratio.
struct NetworkGraph {
    int res1 = 0, res2 = 0;
    int channels = 32;  // C
    bool depthwise = false;
    int depth = 0;  // N = min(4, log2(min(res1, res2)))

    LayerSpec input_conv, input_prelu;
    std::vector<LayerSpec> branch_a, branch_b;  // conv, prelu, pool per level
    int concat_channels = 0;
    LayerSpec head_conv1, head_prelu, head_conv2;

    std::vector<const LayerSpec*> all_layers() const {
        std::vector<const LayerSpec*> v{&input_conv, &input_prelu};
        for (const auto& l : branch_a) v.push_back(&l);
        for (const auto& l : branch_b) v.push_back(&l);
        v.push_back(&head_conv1);
        v.push_back(&head_prelu);
        v.push_back(&head_conv2);
        return v;
    }
};

namespace detail {

inline int exact_log2(int v) {
    int n = 0;
    while (v > 1) {
        if (v % 2 != 0) return -1;
        v /= 2;
        ++n;
    }
    return n;
}

}  // namespace detail

constexpr int kInputConvChannels = 32;
constexpr int kOutputChannels = 3;

inline NetworkGraph build_graph(int res1, int res2, int channels, bool depthwise) {
    if (res1 < 2 || res2 < 2 || detail::exact_log2(res1) < 0 || detail::exact_log2(res2) < 0) {
        throw std::invalid_argument("build_graph: resolutions must be powers of two >= 2");
    }
    if (channels < 1) throw std::invalid_argument("build_graph: channels must be positive");
    NetworkGraph g;
    g.res1 = res1;
    g.res2 = res2;
    g.channels = channels;
    g.depthwise = depthwise;
    g.depth = std::min(4, detail::exact_log2(std::min(res1, res2)));

    g.input_conv = {LayerKind::kConv3dCausal, "input_conv", 3,    kInputConvChannels,
                    5,                        5,            5,    1,
                    1,                        1,            false, res1,
                    res2,                     res1,         res2};
    g.input_prelu = {LayerKind::kPrelu, "input_prelu", kInputConvChannels, kInputConvChannels,
                     1,                 1,             1,
                     1,                 1,             1,
                     false,             res1,          res2,
                     res1,              res2};

    auto make_branch = [&](const std::string& prefix, int pool_e, int pool_a,
                           std::vector<LayerSpec>& out) {
        int el = res1, az = res2;
        int in_ch = kInputConvChannels;
        for (int i = 1; i <= g.depth; ++i) {
            const std::string id = prefix + std::to_string(i);
            out.push_back({LayerKind::kConv3dCausal, id + ".conv", in_ch, channels, 5, 3, 3, 1, 1,
                           1, false, el, az, el, az});
            out.push_back({LayerKind::kPrelu, id + ".prelu", channels, channels, 1, 1, 1, 1, 1, 1,
                           false, el, az, el, az});
            const int oel = el / pool_e, oaz = az / pool_a;
            out.push_back({LayerKind::kMaxPool3d, id + ".pool", channels, channels, 1, 1, 1, 1,
                           pool_e, pool_a, false, el, az, oel, oaz});
            el = oel;
            az = oaz;
            in_ch = channels;
        }
    };
    make_branch("branch_a.", 1, 2, g.branch_a);  // pools azimuth
    make_branch("branch_b.", 2, 1, g.branch_b);  // pools elevation
    const int tail_a = g.branch_a.back().out_el * g.branch_a.back().out_az;
    const int tail_b = g.branch_b.back().out_el * g.branch_b.back().out_az;
    g.concat_channels = channels * tail_a + channels * tail_b;

    const int head_ch = 4 * channels;
    g.head_conv1 = {LayerKind::kConv1dCausalDilated,
                    "head_conv1",
                    g.concat_channels,
                    head_ch,
                    5,
                    1,
                    1,
                    2,
                    1,
                    1,
                    depthwise,
                    1,
                    1,
                    1,
                    1};
    g.head_prelu = {LayerKind::kPrelu, "head_prelu", head_ch, head_ch, 1, 1, 1, 1, 1, 1, false, 1,
                    1, 1, 1};
    g.head_conv2 = {LayerKind::kConv1dCausalDilated,
                    "head_conv2",
                    head_ch,
                    kOutputChannels,
                    5,
                    1,
                    1,
                    2,
                    1,
                    1,
                    false,
                    1,
                    1,
                    1,
                    1};
    return g;
}

inline long long layer_params(const LayerSpec& l) {
    switch (l.kind) {
        case LayerKind::kConv3dCausal:
            return static_cast<long long>(l.in_ch) * l.out_ch * l.kt * l.ke * l.ka + l.out_ch;
        case LayerKind::kPrelu:
            return l.out_ch;
        case LayerKind::kConv1dCausalDilated:
            if (l.depthwise_separable) {
                return static_cast<long long>(l.in_ch) * l.kt + l.in_ch +
                       static_cast<long long>(l.in_ch) * l.out_ch + l.out_ch;
            }
            return static_cast<long long>(l.in_ch) * l.out_ch * l.kt + l.out_ch;
        default:
            return 0;
    }
}

struct ParamCount {
    std::vector<std::pair<std::string, long long>> per_layer;
    long long total = 0;
};

inline ParamCount count_params(const NetworkGraph& g) {
    ParamCount c;
    for (const LayerSpec* l : g.all_layers()) {
        const long long p = layer_params(*l);
        c.per_layer.emplace_back(l->name, p);
        c.total += p;
    }
    return c;
}

// FLOPs per output frame; one MAC counts as 2 operations, pooling and PReLU
// as 1 operation per output element. Bias adds are folded into the MACs.
inline long long layer_flops(const LayerSpec& l) {
    const long long out_elems = static_cast<long long>(l.out_ch) * l.out_el * l.out_az;
    switch (l.kind) {
        case LayerKind::kConv3dCausal:
            return 2 * out_elems * l.in_ch * l.kt * l.ke * l.ka;
        case LayerKind::kPrelu:
        case LayerKind::kMaxPool3d:
            return out_elems;
        case LayerKind::kConv1dCausalDilated:
            if (l.depthwise_separable) {
                return 2LL * l.in_ch * l.kt + 2LL * l.in_ch * l.out_ch;
            }
            return 2LL * l.out_ch * l.in_ch * l.kt;
        default:
            return 0;
    }
}

struct FlopCount {
    std::vector<std::pair<std::string, long long>> per_layer;
    long long total = 0;
};

inline FlopCount count_flops(const NetworkGraph& g, int time_steps = 1) {
    FlopCount c;
    for (const LayerSpec* l : g.all_layers()) {
        const long long f = layer_flops(*l) * time_steps;
        c.per_layer.emplace_back(l->name, f);
        c.total += f;
    }
    return c;
}

// Values held on-chip for causal history: each temporal layer's input feature
// buffered to its history length. The trunk output is buffered once and
// serves both branches.
inline long long causal_buffer_values(const NetworkGraph& g) {
    const long long spatial = static_cast<long long>(g.res1) * g.res2;
    long long v = 0;
    v += 5LL * 3 * spatial;                    // network input
    v += 5LL * kInputConvChannels * spatial;   // trunk output, shared by both branches
    for (const auto* branch : {&g.branch_a, &g.branch_b}) {
        for (std::size_t i = 0; i < branch->size(); i += 3) {
            const LayerSpec& conv = (*branch)[i];
            if (i == 0) continue;  // reads the shared trunk buffer
            v += static_cast<long long>(conv.history_len()) * conv.in_ch * conv.in_el * conv.in_az;
        }
    }
    v += static_cast<long long>(g.head_conv1.history_len()) * g.concat_channels;
    v += static_cast<long long>(g.head_conv2.history_len()) * g.head_conv2.in_ch;
    return v;
}

// ---------------------------------------------------------------------------
// Weights

inline std::vector<std::pair<std::string, std::vector<std::uint32_t>>> expected_tensors(
    const NetworkGraph& g) {
    std::vector<std::pair<std::string, std::vector<std::uint32_t>>> out;
    auto u = [](int v) { return static_cast<std::uint32_t>(v); };
    auto conv3d = [&](const LayerSpec& l) {
        out.push_back({l.name + ".weight", {u(l.out_ch), u(l.in_ch), u(l.kt), u(l.ke), u(l.ka)}});
        out.push_back({l.name + ".bias", {u(l.out_ch)}});
    };
    auto prelu = [&](const LayerSpec& l) { out.push_back({l.name + ".alpha", {u(l.out_ch)}}); };
    auto conv1d = [&](const LayerSpec& l) {
        if (l.depthwise_separable) {
            out.push_back({l.name + ".dw_weight", {u(l.in_ch), u(l.kt)}});
            out.push_back({l.name + ".dw_bias", {u(l.in_ch)}});
            out.push_back({l.name + ".pw_weight", {u(l.out_ch), u(l.in_ch)}});
            out.push_back({l.name + ".pw_bias", {u(l.out_ch)}});
        } else {
            out.push_back({l.name + ".weight", {u(l.out_ch), u(l.in_ch), u(l.kt)}});
            out.push_back({l.name + ".bias", {u(l.out_ch)}});
        }
    };
    conv3d(g.input_conv);
    prelu(g.input_prelu);
    for (const auto* branch : {&g.branch_a, &g.branch_b}) {
        for (const auto& l : *branch) {
            if (l.kind == LayerKind::kConv3dCausal) conv3d(l);
            if (l.kind == LayerKind::kPrelu) prelu(l);
        }
    }
    conv1d(g.head_conv1);
    prelu(g.head_prelu);
    conv1d(g.head_conv2);
    return out;
}

using WeightBundle = TensorFile;

// Deterministic seeded weights, uniform in [-0.1, 0.1].
inline WeightBundle make_random_weights(const NetworkGraph& g, std::uint64_t seed) {
    WeightBundle b;
    b.res1 = static_cast<std::uint32_t>(g.res1);
    b.res2 = static_cast<std::uint32_t>(g.res2);
    b.channels = static_cast<std::uint32_t>(g.channels);
    b.depthwise = g.depthwise ? 1 : 0;
    std::mt19937_64 rng(seed);
    for (const auto& [name, dims] : expected_tensors(g)) {
        TensorEntry t;
        t.name = name;
        t.dims = dims;
        t.data.resize(t.element_count());
        for (auto& v : t.data) {
            const double u01 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            v = static_cast<float>(0.2 * u01 - 0.1);
        }
        b.tensors.push_back(std::move(t));
    }
    return b;
}

inline void validate_weights(const NetworkGraph& g, const WeightBundle& b) {
    if (static_cast<int>(b.res1) != g.res1 || static_cast<int>(b.res2) != g.res2 ||
        static_cast<int>(b.channels) != g.channels || (b.depthwise != 0) != g.depthwise) {
        throw std::runtime_error("weights: shape error: bundle config (" + std::to_string(b.res1) +
                                 "," + std::to_string(b.res2) + "," + std::to_string(b.channels) +
                                 (b.depthwise ? ",depthwise" : ",dense") +
                                 ") does not match graph");
    }
    for (const auto& [name, dims] : expected_tensors(g)) {
        const TensorEntry* t = b.find(name);
        if (t == nullptr) throw std::runtime_error("weights: missing tensor " + name);
        if (t->dims != dims) throw std::runtime_error("weights: shape error in layer " + name);
    }
}

inline void save_weights(const std::string& path, const WeightBundle& b) { b.write(path); }
inline WeightBundle load_weights(const std::string& path) { return TensorFile::read(path); }

// ---------------------------------------------------------------------------
// Inference

namespace detail {

inline std::vector<double> tensor_as_double(const WeightBundle& b, const std::string& name) {
    const TensorEntry* t = b.find(name);
    if (t == nullptr) throw std::runtime_error("weights: missing tensor " + name);
    return std::vector<double>(t->data.begin(), t->data.end());
}

// One output step of a causal 3D convolution. `steps[dt]` points at the input
// frame for temporal tap dt (time t - (kt-1-dt)*dilation); null means before
// the sequence start and contributes zeros.
inline void conv3d_step(const LayerSpec& l, const double* const* steps, const double* w,
                        const double* b, double* out) {
    const int pe = l.ke / 2, pa = l.ka / 2;
    for (int co = 0; co < l.out_ch; ++co) {
        for (int e = 0; e < l.out_el; ++e) {
            for (int a = 0; a < l.out_az; ++a) {
                double acc = b[co];
                for (int dt = 0; dt < l.kt; ++dt) {
                    const double* in = steps[dt];
                    if (in == nullptr) continue;
                    for (int ci = 0; ci < l.in_ch; ++ci) {
                        for (int de = 0; de < l.ke; ++de) {
                            const int ie = e + de - pe;
                            if (ie < 0 || ie >= l.in_el) continue;
                            for (int da = 0; da < l.ka; ++da) {
                                const int ia = a + da - pa;
                                if (ia < 0 || ia >= l.in_az) continue;
                                const double wv =
                                    w[((((static_cast<std::size_t>(co) * l.in_ch + ci) * l.kt +
                                         dt) *
                                            l.ke +
                                        de) *
                                           l.ka +
                                       da)];
                                acc += wv * in[(static_cast<std::size_t>(ci) * l.in_el + ie) *
                                                   l.in_az +
                                               ia];
                            }
                        }
                    }
                }
                out[(static_cast<std::size_t>(co) * l.out_el + e) * l.out_az + a] = acc;
            }
        }
    }
}

inline void conv1d_step(const LayerSpec& l, const double* const* steps, const double* w,
                        const double* b, double* out) {
    for (int co = 0; co < l.out_ch; ++co) {
        double acc = b[co];
        for (int dt = 0; dt < l.kt; ++dt) {
            const double* in = steps[dt];
            if (in == nullptr) continue;
            for (int ci = 0; ci < l.in_ch; ++ci) {
                acc += w[(static_cast<std::size_t>(co) * l.in_ch + ci) * l.kt + dt] * in[ci];
            }
        }
        out[co] = acc;
    }
}

inline void depthwise_step(const LayerSpec& l, const double* const* steps, const double* w,
                           const double* b, double* out) {
    for (int c = 0; c < l.in_ch; ++c) {
        double acc = b[c];
        for (int dt = 0; dt < l.kt; ++dt) {
            const double* in = steps[dt];
            if (in == nullptr) continue;
            acc += w[static_cast<std::size_t>(c) * l.kt + dt] * in[c];
        }
        out[c] = acc;
    }
}

inline void pointwise_step(int in_ch, int out_ch, const double* in, const double* w,
                           const double* b, double* out) {
    for (int co = 0; co < out_ch; ++co) {
        double acc = b[co];
        for (int ci = 0; ci < in_ch; ++ci) {
            acc += w[static_cast<std::size_t>(co) * in_ch + ci] * in[ci];
        }
        out[co] = acc;
    }
}

inline void prelu_inplace(const LayerSpec& l, const double* alpha, std::vector<double>& v) {
    const std::size_t per_ch = static_cast<std::size_t>(l.in_el) * l.in_az;
    for (int c = 0; c < l.out_ch; ++c) {
        for (std::size_t i = 0; i < per_ch; ++i) {
            double& x = v[static_cast<std::size_t>(c) * per_ch + i];
            if (x < 0.0) x *= alpha[c];
        }
    }
}

inline void maxpool_step(const LayerSpec& l, const std::vector<double>& in,
                         std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(l.out_ch) * l.out_el * l.out_az, 0.0);
    for (int c = 0; c < l.out_ch; ++c) {
        for (int e = 0; e < l.out_el; ++e) {
            for (int a = 0; a < l.out_az; ++a) {
                double m = -std::numeric_limits<double>::infinity();
                for (int de = 0; de < l.pool_e; ++de) {
                    for (int da = 0; da < l.pool_a; ++da) {
                        const int ie = e * l.pool_e + de;
                        const int ia = a * l.pool_a + da;
                        m = std::max(m, in[(static_cast<std::size_t>(c) * l.in_el + ie) * l.in_az +
                                           ia]);
                    }
                }
                out[(static_cast<std::size_t>(c) * l.out_el + e) * l.out_az + a] = m;
            }
        }
    }
}

// Per-layer weight storage resolved to doubles.
struct LayerWeights {
    std::vector<double> w, b;        // conv weight/bias or depthwise pair
    std::vector<double> pw, pb;      // pointwise part of a separable layer
    std::vector<double> alpha;       // prelu
};

struct ResolvedWeights {
    LayerWeights input_conv, input_prelu;
    std::vector<LayerWeights> branch_a, branch_b;
    LayerWeights head_conv1, head_prelu, head_conv2;
};

inline ResolvedWeights resolve_weights(const NetworkGraph& g, const WeightBundle& b) {
    validate_weights(g, b);
    ResolvedWeights r;
    auto conv3d = [&](const LayerSpec& l, LayerWeights& lw) {
        lw.w = tensor_as_double(b, l.name + ".weight");
        lw.b = tensor_as_double(b, l.name + ".bias");
    };
    auto prelu = [&](const LayerSpec& l, LayerWeights& lw) {
        lw.alpha = tensor_as_double(b, l.name + ".alpha");
    };
    auto conv1d = [&](const LayerSpec& l, LayerWeights& lw) {
        if (l.depthwise_separable) {
            lw.w = tensor_as_double(b, l.name + ".dw_weight");
            lw.b = tensor_as_double(b, l.name + ".dw_bias");
            lw.pw = tensor_as_double(b, l.name + ".pw_weight");
            lw.pb = tensor_as_double(b, l.name + ".pw_bias");
        } else {
            lw.w = tensor_as_double(b, l.name + ".weight");
            lw.b = tensor_as_double(b, l.name + ".bias");
        }
    };
    conv3d(g.input_conv, r.input_conv);
    prelu(g.input_prelu, r.input_prelu);
    r.branch_a.resize(g.branch_a.size());
    r.branch_b.resize(g.branch_b.size());
    for (std::size_t i = 0; i < g.branch_a.size(); ++i) {
        if (g.branch_a[i].kind == LayerKind::kConv3dCausal) conv3d(g.branch_a[i], r.branch_a[i]);
        if (g.branch_a[i].kind == LayerKind::kPrelu) prelu(g.branch_a[i], r.branch_a[i]);
    }
    for (std::size_t i = 0; i < g.branch_b.size(); ++i) {
        if (g.branch_b[i].kind == LayerKind::kConv3dCausal) conv3d(g.branch_b[i], r.branch_b[i]);
        if (g.branch_b[i].kind == LayerKind::kPrelu) prelu(g.branch_b[i], r.branch_b[i]);
    }
    conv1d(g.head_conv1, r.head_conv1);
    prelu(g.head_prelu, r.head_prelu);
    conv1d(g.head_conv2, r.head_conv2);
    return r;
}

}  // namespace detail

// Streaming inference: one frame in, one xyz out, causal history buffered per
// temporal layer. Whole-sequence inference below runs the same step kernels,
// so the two agree to the last bit.
class StreamingEngine {
  public:
    StreamingEngine(const NetworkGraph& graph, const WeightBundle& weights)
        : g_(graph), w_(detail::resolve_weights(graph, weights)) {
        input_hist_.assign(hist_steps(g_.input_conv), {});
        const std::size_t levels = static_cast<std::size_t>(g_.depth);
        a_hist_.resize(levels);
        b_hist_.resize(levels);
        for (std::size_t i = 0; i < levels; ++i) {
            a_hist_[i].assign(hist_steps(g_.branch_a[i * 3]), {});
            b_hist_[i].assign(hist_steps(g_.branch_b[i * 3]), {});
        }
        h1_hist_.assign(hist_steps(g_.head_conv1), {});
        h2_hist_.assign(hist_steps(g_.head_conv2), {});
    }

    // `frame` is one feature step, [channel][elevation][azimuth] flattened.
    std::array<double, 3> push(const std::vector<double>& frame) {
        std::vector<double> trunk = conv_step(g_.input_conv, w_.input_conv, input_hist_, frame);
        detail::prelu_inplace(g_.input_prelu, w_.input_prelu.alpha.data(), trunk);
        std::vector<double> a = trunk, b = trunk;
        for (int i = 0; i < g_.depth; ++i) {
            a = branch_level(g_.branch_a, w_.branch_a, a_hist_, i, a);
            b = branch_level(g_.branch_b, w_.branch_b, b_hist_, i, b);
        }
        std::vector<double> cat;
        cat.reserve(a.size() + b.size());
        cat.insert(cat.end(), a.begin(), a.end());
        cat.insert(cat.end(), b.begin(), b.end());
        std::vector<double> h = head_step(g_.head_conv1, w_.head_conv1, h1_hist_, cat);
        detail::prelu_inplace(g_.head_prelu, w_.head_prelu.alpha.data(), h);
        std::vector<double> xyz = head_step(g_.head_conv2, w_.head_conv2, h2_hist_, h);
        return {xyz[0], xyz[1], xyz[2]};
    }

  private:
    using Hist = std::vector<std::vector<double>>;

    static std::size_t hist_steps(const LayerSpec& l) {
        return static_cast<std::size_t>((l.kt - 1) * l.dilation);
    }

    // Assemble the temporal tap window (oldest tap first), run the step, then
    // rotate the history. Empty history slots read as zeros.
    template <typename StepFn>
    std::vector<double> windowed_step(const LayerSpec& l, Hist& hist,
                                      const std::vector<double>& cur, StepFn&& step) {
        std::vector<const double*> taps(static_cast<std::size_t>(l.kt));
        for (int dt = 0; dt < l.kt; ++dt) {
            const int back = (l.kt - 1 - dt) * l.dilation;
            if (back == 0) {
                taps[static_cast<std::size_t>(dt)] = cur.data();
            } else {
                const std::vector<double>& h = hist[hist.size() - static_cast<std::size_t>(back)];
                taps[static_cast<std::size_t>(dt)] = h.empty() ? nullptr : h.data();
            }
        }
        std::vector<double> out = step(taps.data());
        if (!hist.empty()) {
            hist.erase(hist.begin());
            hist.push_back(cur);
        }
        return out;
    }

    std::vector<double> conv_step(const LayerSpec& l, const detail::LayerWeights& lw, Hist& hist,
                                  const std::vector<double>& cur) {
        return windowed_step(l, hist, cur, [&](const double* const* taps) {
            std::vector<double> out(static_cast<std::size_t>(l.out_ch) * l.out_el * l.out_az);
            detail::conv3d_step(l, taps, lw.w.data(), lw.b.data(), out.data());
            return out;
        });
    }

    std::vector<double> head_step(const LayerSpec& l, const detail::LayerWeights& lw, Hist& hist,
                                  const std::vector<double>& cur) {
        return windowed_step(l, hist, cur, [&](const double* const* taps) {
            std::vector<double> out(static_cast<std::size_t>(l.out_ch));
            if (l.depthwise_separable) {
                std::vector<double> mid(static_cast<std::size_t>(l.in_ch));
                detail::depthwise_step(l, taps, lw.w.data(), lw.b.data(), mid.data());
                detail::pointwise_step(l.in_ch, l.out_ch, mid.data(), lw.pw.data(), lw.pb.data(),
                                       out.data());
            } else {
                detail::conv1d_step(l, taps, lw.w.data(), lw.b.data(), out.data());
            }
            return out;
        });
    }

    std::vector<double> branch_level(const std::vector<LayerSpec>& specs,
                                     const std::vector<detail::LayerWeights>& lws,
                                     std::vector<Hist>& hists, int level,
                                     const std::vector<double>& in) {
        const std::size_t base = static_cast<std::size_t>(level) * 3;
        std::vector<double> v =
            conv_step(specs[base], lws[base], hists[static_cast<std::size_t>(level)], in);
        detail::prelu_inplace(specs[base + 1], lws[base + 1].alpha.data(), v);
        std::vector<double> pooled;
        detail::maxpool_step(specs[base + 2], v, pooled);
        return pooled;
    }

    NetworkGraph g_;
    detail::ResolvedWeights w_;
    Hist input_hist_;
    std::vector<Hist> a_hist_, b_hist_;
    Hist h1_hist_, h2_hist_;
};

namespace detail {

// [time][channel * el * az] activation sequence for whole-sequence inference.
using Seq = std::vector<std::vector<double>>;

inline Seq conv3d_seq(const LayerSpec& l, const LayerWeights& lw, const Seq& in) {
    const int pe = l.ke / 2, pa = l.ka / 2;
    Seq out(in.size(),
            std::vector<double>(static_cast<std::size_t>(l.out_ch) * l.out_el * l.out_az));
    for (std::size_t t = 0; t < in.size(); ++t) {
        for (int co = 0; co < l.out_ch; ++co) {
            for (int e = 0; e < l.out_el; ++e) {
                for (int a = 0; a < l.out_az; ++a) {
                    double acc = lw.b[static_cast<std::size_t>(co)];
                    for (int dt = 0; dt < l.kt; ++dt) {
                        const long long tt =
                            static_cast<long long>(t) - (l.kt - 1 - dt) * l.dilation;
                        if (tt < 0) continue;
                        const std::vector<double>& iv = in[static_cast<std::size_t>(tt)];
                        for (int ci = 0; ci < l.in_ch; ++ci) {
                            for (int de = 0; de < l.ke; ++de) {
                                const int ie = e + de - pe;
                                if (ie < 0 || ie >= l.in_el) continue;
                                for (int da = 0; da < l.ka; ++da) {
                                    const int ia = a + da - pa;
                                    if (ia < 0 || ia >= l.in_az) continue;
                                    acc += lw.w[((((static_cast<std::size_t>(co) * l.in_ch + ci) *
                                                       l.kt +
                                                   dt) *
                                                      l.ke +
                                                  de) *
                                                     l.ka +
                                                 da)] *
                                           iv[(static_cast<std::size_t>(ci) * l.in_el + ie) *
                                                  l.in_az +
                                              ia];
                                }
                            }
                        }
                    }
                    out[t][(static_cast<std::size_t>(co) * l.out_el + e) * l.out_az + a] = acc;
                }
            }
        }
    }
    return out;
}

inline Seq conv1d_seq(const LayerSpec& l, const LayerWeights& lw, const Seq& in) {
    Seq out(in.size(), std::vector<double>(static_cast<std::size_t>(l.out_ch)));
    for (std::size_t t = 0; t < in.size(); ++t) {
        if (l.depthwise_separable) {
            std::vector<double> mid(static_cast<std::size_t>(l.in_ch));
            for (int c = 0; c < l.in_ch; ++c) {
                double acc = lw.b[static_cast<std::size_t>(c)];
                for (int dt = 0; dt < l.kt; ++dt) {
                    const long long tt = static_cast<long long>(t) - (l.kt - 1 - dt) * l.dilation;
                    if (tt < 0) continue;
                    acc += lw.w[static_cast<std::size_t>(c) * l.kt + dt] *
                           in[static_cast<std::size_t>(tt)][static_cast<std::size_t>(c)];
                }
                mid[static_cast<std::size_t>(c)] = acc;
            }
            pointwise_step(l.in_ch, l.out_ch, mid.data(), lw.pw.data(), lw.pb.data(),
                           out[t].data());
        } else {
            for (int co = 0; co < l.out_ch; ++co) {
                double acc = lw.b[static_cast<std::size_t>(co)];
                for (int dt = 0; dt < l.kt; ++dt) {
                    const long long tt = static_cast<long long>(t) - (l.kt - 1 - dt) * l.dilation;
                    if (tt < 0) continue;
                    for (int ci = 0; ci < l.in_ch; ++ci) {
                        acc += lw.w[(static_cast<std::size_t>(co) * l.in_ch + ci) * l.kt + dt] *
                               in[static_cast<std::size_t>(tt)][static_cast<std::size_t>(ci)];
                    }
                }
                out[t][static_cast<std::size_t>(co)] = acc;
            }
        }
    }
    return out;
}

inline Seq branch_seq(const std::vector<LayerSpec>& specs, const std::vector<LayerWeights>& lws,
                      int depth, const Seq& in) {
    Seq v = in;
    for (int i = 0; i < depth; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * 3;
        v = conv3d_seq(specs[base], lws[base], v);
        for (auto& step : v) prelu_inplace(specs[base + 1], lws[base + 1].alpha.data(), step);
        Seq pooled(v.size());
        for (std::size_t t = 0; t < v.size(); ++t) maxpool_step(specs[base + 2], v[t], pooled[t]);
        v = std::move(pooled);
    }
    return v;
}

}  // namespace detail

// Whole-sequence inference; returns raw (un-normalized) xyz per frame.
inline std::vector<std::array<double, 3>> infer(const NetworkGraph& g, const WeightBundle& weights,
                                                const FeatureTensor& x) {
    if (x.res_elevation != g.res1 || x.res_azimuth != g.res2 || x.channels != 3) {
        throw std::invalid_argument("infer: feature tensor does not match graph resolution");
    }
    const detail::ResolvedWeights w = detail::resolve_weights(g, weights);
    detail::Seq seq(static_cast<std::size_t>(x.time),
                    std::vector<double>(3 * x.spatial_size()));
    for (int t = 0; t < x.time; ++t) {
        for (int c = 0; c < 3; ++c) {
            for (int e = 0; e < x.res_elevation; ++e) {
                for (int a = 0; a < x.res_azimuth; ++a) {
                    seq[static_cast<std::size_t>(t)]
                       [(static_cast<std::size_t>(c) * x.res_elevation + e) * x.res_azimuth + a] =
                           x.at(c, t, e, a);
                }
            }
        }
    }
    detail::Seq trunk = detail::conv3d_seq(g.input_conv, w.input_conv, seq);
    for (auto& step : trunk) detail::prelu_inplace(g.input_prelu, w.input_prelu.alpha.data(), step);
    detail::Seq a = detail::branch_seq(g.branch_a, w.branch_a, g.depth, trunk);
    detail::Seq b = detail::branch_seq(g.branch_b, w.branch_b, g.depth, trunk);
    detail::Seq cat(trunk.size());
    for (std::size_t t = 0; t < trunk.size(); ++t) {
        cat[t].reserve(a[t].size() + b[t].size());
        cat[t].insert(cat[t].end(), a[t].begin(), a[t].end());
        cat[t].insert(cat[t].end(), b[t].begin(), b[t].end());
    }
    detail::Seq h = detail::conv1d_seq(g.head_conv1, w.head_conv1, cat);
    for (auto& step : h) detail::prelu_inplace(g.head_prelu, w.head_prelu.alpha.data(), step);
    detail::Seq xyz = detail::conv1d_seq(g.head_conv2, w.head_conv2, h);
    std::vector<std::array<double, 3>> out;
    out.reserve(xyz.size());
    for (const auto& v : xyz) out.push_back({v[0], v[1], v[2]});
    return out;
}

// Unit-normalized DOA estimates; zero rows stay zero.
inline std::vector<std::array<double, 3>> normalize_doas(
    const std::vector<std::array<double, 3>>& raw) {
    std::vector<std::array<double, 3>> out = raw;
    for (auto& v : out) {
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (n > 0.0) {
            v[0] /= n;
            v[1] /= n;
            v[2] /= n;
        }
    }
    return out;
}

}  // namespace srpedge
