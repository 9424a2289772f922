#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "srpedge/geometry.hpp"
#include "srpedge/net.hpp"
#include "srpedge/srp.hpp"

namespace srpedge {

// Analytic hardware-overhead model. Everything here is closed form; nothing
// executes a kernel. Storage is sized at 4 bytes per value (32-bit floats).
struct CostReport {
    std::string label;
    std::string srp_method;

    double srp_flops_per_frame = 0.0;
    double dnn_flops_per_frame = 0.0;
    double frames_per_second = 0.0;

    double weight_bytes = 0.0;
    double srp_onchip_bytes = 0.0;
    double dnn_onchip_bytes = 0.0;

    double input_fetch_bytes_per_frame = 0.0;

    double total_flops_per_frame() const { return srp_flops_per_frame + dnn_flops_per_frame; }
    double flops_per_second() const { return total_flops_per_frame() * frames_per_second; }
    double onchip_bytes() const { return srp_onchip_bytes + dnn_onchip_bytes; }
    double bandwidth_bytes_per_second() const {
        return (weight_bytes + input_fetch_bytes_per_frame) * frames_per_second;
    }
    double operational_intensity() const {
        const double bw = bandwidth_bytes_per_second();
        return bw > 0.0 ? flops_per_second() / bw : 0.0;
    }
};

struct SrpCostInputs {
    int n_mics = 12;
    int k = 4096;
    int q = 128;
    int fs = 16000;
    double overlap = 0.25;
    long long two_sided_total = 0;  // sum over pairs of (2 N_samp + 1)
    long long one_sided_total = 0;  // sum over pairs of (N_samp + 1)
    int max_nsamp = 0;

    static SrpCostInputs from_geometry(const MicArray& array, const CandidateGrid& grid, int k,
                                       int fs, double overlap) {
        const SampleBounds b = n_samp(array, fs);
        SrpCostInputs in;
        in.n_mics = array.mic_count();
        in.k = k;
        in.q = grid.candidate_count();
        in.fs = fs;
        in.overlap = overlap;
        in.two_sided_total = b.two_sided_total();
        in.one_sided_total = b.one_sided_total();
        in.max_nsamp = b.max_per_pair();
        return in;
    }

    double pairs() const { return n_mics * (n_mics - 1) / 2.0; }
    double bins() const { return k / 2.0 + 1.0; }
    double fps() const { return fs / (k * (1.0 - overlap)); }
};

// Shared front end: real FFT per channel, frequency-domain GCC, PHAT.
inline double srp_common_flops(const SrpCostInputs& in) {
    return 2.0 * in.n_mics * in.k * std::log2(static_cast<double>(in.k)) +
           4.0 * in.pairs() * in.bins() + 10.0 * in.n_mics * in.bins();
}

inline double srp_extra_flops(SrpMethod method, const SrpCostInputs& in) {
    const double ns = static_cast<double>(in.two_sided_total);
    switch (method) {
        case SrpMethod::kFd:
            // direct evaluation of the steering sum at every bin and candidate
            return 4.0 * in.pairs() * in.q * in.bins();
        case SrpMethod::kTd:
            return 2.0 * in.pairs() * in.k * std::log2(static_cast<double>(in.k)) +
                   in.pairs() * in.q;
        case SrpMethod::kLc:
            return ns * (2.0 * in.k + 4.0) + ns * 2.0 * in.q;
        case SrpMethod::kLcEdge:
            return (ns - in.n_mics * (in.n_mics - 1) / 4.0) * (in.k + 2.0 + 2.0 * in.q);
    }
    return 0.0;
}

// Method-specific coefficient storage: TD keeps an integer lag per (pair,
// candidate); LC the two-sided sinc table; LC-Edge the one-sided core table
// plus the sample-domain TDOAs it rescales at run time.
inline double srp_coefficient_bytes(SrpMethod method, const SrpCostInputs& in) {
    switch (method) {
        case SrpMethod::kFd:
            return in.pairs() * in.q * 4.0;  // TDOA table, steering evaluated on the fly
        case SrpMethod::kTd:
            return in.pairs() * in.q * 4.0;
        case SrpMethod::kLc:
            return static_cast<double>(in.two_sided_total) * in.q * 4.0;
        case SrpMethod::kLcEdge:
            return static_cast<double>(in.one_sided_total) * in.q * 4.0 +
                   in.pairs() * in.q * 4.0;
    }
    return 0.0;
}

// Precomputed Fourier banks for the interpolation lags: LC touches complex
// exponentials over the two-sided index range, LC-Edge cosine/sine banks over
// the one-sided range only.
inline double srp_twiddle_bytes(SrpMethod method, const SrpCostInputs& in) {
    switch (method) {
        case SrpMethod::kLc:
            return (2.0 * in.max_nsamp + 1.0) * in.bins() * 2.0 * 4.0;
        case SrpMethod::kLcEdge:
            return (in.max_nsamp + 1.0) * in.bins() * 2.0 * 4.0;
        default:
            return 0.0;
    }
}

inline double srp_onchip_bytes(SrpMethod method, const SrpCostInputs& in) {
    const double window = static_cast<double>(in.n_mics) * in.k * 4.0;  // resident input window
    const double workspace = 2.0 * in.k * 4.0;                          // one complex K buffer
    const double map = in.q * 4.0;
    return window + workspace + map + srp_coefficient_bytes(method, in) +
           srp_twiddle_bytes(method, in);
}

inline CostReport srp_cost(SrpMethod method, const SrpCostInputs& in) {
    CostReport r;
    r.label = to_string(method);
    r.srp_method = to_string(method);
    r.frames_per_second = in.fps();
    r.srp_flops_per_frame = srp_common_flops(in) + srp_extra_flops(method, in);
    r.srp_onchip_bytes = srp_onchip_bytes(method, in);
    // New samples entering the analysis window each frame.
    r.input_fetch_bytes_per_frame = in.n_mics * in.k * (1.0 - in.overlap) * 4.0;
    return r;
}

// DNN side: per-frame FLOPs, weight traffic (weights are refetched per frame)
// and on-chip causal feature buffers.
inline CostReport dnn_cost(const NetworkGraph& g, double frames_per_second) {
    CostReport r;
    r.label = "dnn";
    r.frames_per_second = frames_per_second;
    r.dnn_flops_per_frame = static_cast<double>(count_flops(g, 1).total);
    r.weight_bytes = static_cast<double>(count_params(g).total) * 4.0;
    r.dnn_onchip_bytes = static_cast<double>(causal_buffer_values(g)) * 4.0;
    return r;
}

inline CostReport combined_cost(const std::string& label, SrpMethod method,
                                const SrpCostInputs& in, const NetworkGraph& g) {
    CostReport srp = srp_cost(method, in);
    const CostReport dnn = dnn_cost(g, srp.frames_per_second);
    CostReport r = srp;
    r.label = label;
    r.dnn_flops_per_frame = dnn.dnn_flops_per_frame;
    r.weight_bytes = dnn.weight_bytes;
    r.dnn_onchip_bytes = dnn.dnn_onchip_bytes;
    return r;
}

inline std::string roofline_csv(const std::vector<CostReport>& reports) {
    std::ostringstream os;
    os << "label,srp_method,frames_per_second,flops_per_frame,flops_per_second,"
          "weight_bytes,srp_onchip_bytes,dnn_onchip_bytes,onchip_bytes,"
          "bandwidth_bytes_per_second,operational_intensity\n";
    os.precision(10);
    for (const auto& r : reports) {
        os << r.label << ',' << r.srp_method << ',' << r.frames_per_second << ','
           << r.total_flops_per_frame() << ',' << r.flops_per_second() << ',' << r.weight_bytes
           << ',' << r.srp_onchip_bytes << ',' << r.dnn_onchip_bytes << ',' << r.onchip_bytes()
           << ',' << r.bandwidth_bytes_per_second() << ',' << r.operational_intensity() << '\n';
    }
    return os.str();
}

inline std::string roofline_json(const std::vector<CostReport>& reports) {
    std::ostringstream os;
    os.precision(10);
    os << "[\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        os << "  {\"label\": \"" << r.label << "\", \"srp_method\": \"" << r.srp_method
           << "\", \"frames_per_second\": " << r.frames_per_second
           << ", \"flops_per_frame\": " << r.total_flops_per_frame()
           << ", \"flops_per_second\": " << r.flops_per_second()
           << ", \"weight_bytes\": " << r.weight_bytes
           << ", \"srp_onchip_bytes\": " << r.srp_onchip_bytes
           << ", \"dnn_onchip_bytes\": " << r.dnn_onchip_bytes
           << ", \"onchip_bytes\": " << r.onchip_bytes()
           << ", \"bandwidth_bytes_per_second\": " << r.bandwidth_bytes_per_second()
           << ", \"operational_intensity\": " << r.operational_intensity() << "}"
           << (i + 1 < reports.size() ? "," : "") << "\n";
    }
    os << "]\n";
    return os.str();
}

}  // namespace srpedge
