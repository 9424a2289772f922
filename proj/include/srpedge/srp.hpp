#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "srpedge/fft.hpp"
#include "srpedge/geometry.hpp"
#include "srpedge/signal.hpp"

namespace srpedge {

// PHAT-whitened cross-spectra for every microphone pair, |G| <= 1 per bin.
struct GccPhatSpectrum {
    int k = 0;
    double eps = 1e-12;
    std::vector<std::vector<std::complex<double>>> pair_bins;  // [pair][K/2+1]

    int pair_count() const { return static_cast<int>(pair_bins.size()); }
};

inline GccPhatSpectrum gcc_phat(const SpectralFrame& frame, const MicArray& array,
                                double eps = 1e-12) {
    if (eps <= 0.0) throw std::invalid_argument("gcc_phat: eps must be positive");
    if (frame.channel_count() != array.mic_count()) {
        throw std::invalid_argument("gcc_phat: frame channels do not match array");
    }
    GccPhatSpectrum g;
    g.k = frame.k;
    g.eps = eps;
    const auto prs = array.pairs();
    g.pair_bins.reserve(prs.size());
    const std::size_t bins = static_cast<std::size_t>(frame.k) / 2 + 1;
    for (const auto& [m, mp] : prs) {
        const auto& xm = frame.bins[static_cast<std::size_t>(m)];
        const auto& xmp = frame.bins[static_cast<std::size_t>(mp)];
        std::vector<std::complex<double>> row(bins);
        for (std::size_t i = 0; i < bins; ++i) {
            const std::complex<double> c = xm[i] * std::conj(xmp[i]);
            row[i] = c / std::max(std::abs(c), eps);
        }
        g.pair_bins.push_back(std::move(row));
    }
    return g;
}

// One steered-response power map with its argmax cell.
struct SrpFrame {
    int frame_index = 0;
    int res_elevation = 0;
    int res_azimuth = 0;
    std::vector<double> power;  // elevation-major, Res1*Res2
    int argmax_elevation = 0;
    int argmax_azimuth = 0;

    double at(int ei, int ai) const {
        return power[static_cast<std::size_t>(ei) * res_azimuth + static_cast<std::size_t>(ai)];
    }
    // Normalized cell-center coordinates in [0,1]^2.
    double argmax_elevation_norm() const { return (argmax_elevation + 0.5) / res_elevation; }
    double argmax_azimuth_norm() const { return (argmax_azimuth + 0.5) / res_azimuth; }
};

namespace detail {

inline void finalize_srp_frame(SrpFrame& f) {
    int best = 0;
    double best_v = f.power.empty() ? 0.0 : f.power[0];
    for (std::size_t q = 0; q < f.power.size(); ++q) {
        if (!std::isfinite(f.power[q])) {
            throw std::runtime_error("srp: non-finite power map value");
        }
        if (f.power[q] > best_v) {
            best_v = f.power[q];
            best = static_cast<int>(q);
        }
    }
    f.argmax_elevation = best / f.res_azimuth;
    f.argmax_azimuth = best % f.res_azimuth;
}

// Accumulates sum_k c_k Re(G_k e^{j k step}) with c = {1, 2, ..., 2, 1}.
// The twiddle rotation is resynchronized periodically to hold double accuracy.
inline double steered_bin_sum(const std::vector<std::complex<double>>& g, double step) {
    const std::size_t half = g.size() - 1;  // K/2
    double acc = g[0].real();
    double interior = 0.0;
    std::complex<double> w(std::cos(step), std::sin(step));
    const std::complex<double> rot = w;
    for (std::size_t k = 1; k < half; ++k) {
        interior += g[k].real() * w.real() - g[k].imag() * w.imag();
        w *= rot;
        if ((k & 511u) == 0u) w = std::polar(1.0, step * static_cast<double>(k + 1));
    }
    acc += 2.0 * interior;
    acc += g[half].real() * std::cos(step * static_cast<double>(half));
    return acc;
}

}  // namespace detail

// Reference frequency-domain SRP-PHAT: P(q) = sum over pairs and bins of the
// steered GCC phase. Exact per-bin evaluation; the oracle the reduced-cost
// variants are checked against.
inline SrpFrame fd_srp(const GccPhatSpectrum& gcc, const TdoaTable& tdoa,
                       const CandidateGrid& grid, int fs, int frame_index = 0) {
    const int k = gcc.k;
    SrpFrame f;
    f.frame_index = frame_index;
    f.res_elevation = grid.res_elevation;
    f.res_azimuth = grid.res_azimuth;
    f.power.assign(static_cast<std::size_t>(grid.candidate_count()), 0.0);
    for (int p = 0; p < gcc.pair_count(); ++p) {
        const auto& g = gcc.pair_bins[static_cast<std::size_t>(p)];
        for (int q = 0; q < grid.candidate_count(); ++q) {
            const double x = tdoa.lag_samples(p, q, fs);
            const double step = 2.0 * std::numbers::pi * x / k;
            f.power[static_cast<std::size_t>(q)] += detail::steered_bin_sum(g, step);
        }
    }
    detail::finalize_srp_frame(f);
    return f;
}

// Time-domain SRP: inverse-transform each pair's GCC and read it at the
// nearest integer lag, negative lags wrapping modulo K. The rounding makes
// this variant lossy against fd_srp except when every lag is integral.
inline SrpFrame td_srp(const GccPhatSpectrum& gcc, const TdoaTable& tdoa,
                       const CandidateGrid& grid, int fs, int frame_index = 0) {
    const int k = gcc.k;
    SrpFrame f;
    f.frame_index = frame_index;
    f.res_elevation = grid.res_elevation;
    f.res_azimuth = grid.res_azimuth;
    f.power.assign(static_cast<std::size_t>(grid.candidate_count()), 0.0);
    for (int p = 0; p < gcc.pair_count(); ++p) {
        const std::vector<double> r =
            irfft_unscaled(gcc.pair_bins[static_cast<std::size_t>(p)], static_cast<std::size_t>(k));
        for (int q = 0; q < grid.candidate_count(); ++q) {
            long long lag = std::llround(tdoa.lag_samples(p, q, fs));
            lag %= k;
            if (lag < 0) lag += k;
            f.power[static_cast<std::size_t>(q)] += r[static_cast<std::size_t>(lag)];
        }
    }
    detail::finalize_srp_frame(f);
    return f;
}

namespace detail {

// sinc(x - n) evaluated from a shared s = sin(pi x): sin(pi(x-n)) = (-1)^n s.
inline double shifted_sinc(double sin_pi_x, double x, long long n) {
    const double d = x - static_cast<double>(n);
    if (std::abs(d) < 1e-12) return 1.0;
    const double v = ((n & 1LL) ? -sin_pi_x : sin_pi_x) / (std::numbers::pi * d);
    return v;
}

}  // namespace detail

// Low-complexity SRP: per pair, the time-domain GCC is evaluated only at the
// integer lags n in [-N_samp, N_samp] and reconstructed at the candidate lag
// by Whittaker-Shannon interpolation, G_appr(tau) = sum_n g[n] sinc(tau/T - n).
inline SrpFrame lc_srp(const GccPhatSpectrum& gcc, const TdoaTable& tdoa,
                       const SampleBounds& bounds, const CandidateGrid& grid, int fs,
                       int frame_index = 0) {
    const int k = gcc.k;
    const std::size_t half = static_cast<std::size_t>(k) / 2;
    SrpFrame f;
    f.frame_index = frame_index;
    f.res_elevation = grid.res_elevation;
    f.res_azimuth = grid.res_azimuth;
    f.power.assign(static_cast<std::size_t>(grid.candidate_count()), 0.0);
    for (int p = 0; p < gcc.pair_count(); ++p) {
        const auto& g = gcc.pair_bins[static_cast<std::size_t>(p)];
        const int nmax = bounds.per_pair[static_cast<std::size_t>(p)];
        std::vector<double> samples(static_cast<std::size_t>(2 * nmax + 1));
        for (int n = -nmax; n <= nmax; ++n) {
            const double step = 2.0 * std::numbers::pi * n / k;
            samples[static_cast<std::size_t>(n + nmax)] = detail::steered_bin_sum(g, step);
        }
        for (int q = 0; q < grid.candidate_count(); ++q) {
            const double x = tdoa.lag_samples(p, q, fs);
            const double s = std::sin(std::numbers::pi * x);
            double acc = 0.0;
            for (int n = -nmax; n <= nmax; ++n) {
                acc += samples[static_cast<std::size_t>(n + nmax)] * detail::shifted_sinc(s, x, n);
            }
            f.power[static_cast<std::size_t>(q)] += acc;
        }
        (void)half;
    }
    detail::finalize_srp_frame(f);
    return f;
}

// Precomputed one-sided interpolation coefficients. Pairing the +-n terms of
// the Whittaker-Shannon sum against the conjugate symmetry of the spectrum
// leaves a single core weight per (pair, candidate, n >= 0),
//
//   W(n) = (-1)^n * 2 sin(pi x) / (pi (x - n)(x + n)),   x = tau / T,
//
// from which the real-branch and imaginary-branch factors are x*W and -n*W.
// The n = 0 row stores sinc(x) (half the raw pairing; the imaginary branch
// vanishes there) so the one-sided sum reproduces the two-sided one exactly.
struct SincTableEdge {
    int k = 0;
    int fs = 0;
    int pair_count = 0;
    int candidate_count = 0;
    std::vector<int> nsamp;            // per pair
    std::vector<std::size_t> offsets;  // per pair, into coeff
    std::vector<double> coeff;         // W, (pair, n, candidate) layout
    std::vector<double> lag;           // tau/T per (pair, candidate)

    std::size_t entry_count() const { return coeff.size(); }
    long long two_sided_entry_count() const {
        long long s = 0;
        for (int n : nsamp) s += (2LL * n + 1) * candidate_count;
        return s;
    }
    const double* row(int pair, int n) const {
        return coeff.data() + offsets[static_cast<std::size_t>(pair)] +
               static_cast<std::size_t>(n) * candidate_count;
    }
    double lag_at(int pair, int q) const {
        return lag[static_cast<std::size_t>(pair) * candidate_count + static_cast<std::size_t>(q)];
    }
    // Derived per-entry coefficient pair of the expanded sum.
    double w_re(int pair, int q, int n) const {
        const double w = row(pair, n)[q];
        return n == 0 ? w : w * lag_at(pair, q);
    }
    double w_im(int pair, int q, int n) const {
        const double w = row(pair, n)[q];
        return n == 0 ? 0.0 : -w * static_cast<double>(n);
    }
};

inline SincTableEdge build_sinc_table_edge(const TdoaTable& tdoa, const SampleBounds& bounds,
                                           const CandidateGrid& grid, int k, int fs) {
    SincTableEdge t;
    t.k = k;
    t.fs = fs;
    t.pair_count = tdoa.pair_count;
    t.candidate_count = grid.candidate_count();
    t.nsamp = bounds.per_pair;
    const int q_count = t.candidate_count;
    std::size_t total = 0;
    for (int p = 0; p < t.pair_count; ++p) {
        t.offsets.push_back(total);
        total += static_cast<std::size_t>(t.nsamp[static_cast<std::size_t>(p)] + 1) *
                 static_cast<std::size_t>(q_count);
    }
    t.coeff.resize(total);
    t.lag.resize(static_cast<std::size_t>(t.pair_count) * q_count);
    for (int p = 0; p < t.pair_count; ++p) {
        for (int q = 0; q < q_count; ++q) {
            t.lag[static_cast<std::size_t>(p) * q_count + static_cast<std::size_t>(q)] =
                tdoa.lag_samples(p, q, fs);
        }
    }
    for (int p = 0; p < t.pair_count; ++p) {
        const int nmax = t.nsamp[static_cast<std::size_t>(p)];
        for (int n = 0; n <= nmax; ++n) {
            double* out = t.coeff.data() + t.offsets[static_cast<std::size_t>(p)] +
                          static_cast<std::size_t>(n) * q_count;
            for (int q = 0; q < q_count; ++q) {
                const double x = t.lag_at(p, q);
                const double s = std::sin(std::numbers::pi * x);
                if (n == 0) {
                    out[q] = detail::shifted_sinc(s, x, 0);
                    continue;
                }
                const double dn = static_cast<double>(n);
                if (std::abs(x - dn) < 1e-8 || std::abs(x + dn) < 1e-8) {
                    // Removable singularity of the factored form; evaluate the
                    // underlying sinc pair and refactor against x.
                    out[q] = (detail::shifted_sinc(s, x, n) + detail::shifted_sinc(s, x, -n)) / x;
                } else {
                    const double sign = (n & 1) ? -1.0 : 1.0;
                    out[q] = sign * 2.0 * s / (std::numbers::pi * (x - dn) * (x + dn));
                }
            }
        }
    }
    return t;
}

// Arithmetic tally for complexity verification; the null version compiles out.
struct NullOpCount {
    void add(long long) {}
    void mul(long long) {}
};
struct OpCount {
    long long adds = 0;
    long long muls = 0;
    void add(long long n) { adds += n; }
    void mul(long long n) { muls += n; }
    long long total() const { return adds + muls; }
};

namespace detail {

// One-sided LC-SRP. The inner real/imaginary projections are computed once
// per (pair, n); candidates then consume the stored core weight as
// W * (x * SR - n * SI). Counter tallies only data-path arithmetic — the
// trig recurrences stand in for precomputed Fourier tables.
template <typename Counter>
SrpFrame lc_srp_edge_impl(const GccPhatSpectrum& gcc, const SincTableEdge& table,
                          const CandidateGrid& grid, Counter& ops, int frame_index) {
    if (gcc.k != table.k || gcc.pair_count() != table.pair_count ||
        grid.candidate_count() != table.candidate_count) {
        throw std::invalid_argument("lc_srp_edge: table does not match spectrum/grid dimensions");
    }
    const int k = gcc.k;
    const std::size_t half = static_cast<std::size_t>(k) / 2;
    const int q_count = table.candidate_count;
    SrpFrame f;
    f.frame_index = frame_index;
    f.res_elevation = grid.res_elevation;
    f.res_azimuth = grid.res_azimuth;
    f.power.assign(static_cast<std::size_t>(q_count), 0.0);
    for (int p = 0; p < gcc.pair_count(); ++p) {
        const auto& g = gcc.pair_bins[static_cast<std::size_t>(p)];
        const double* lag = table.lag.data() + static_cast<std::size_t>(p) * q_count;
        const int nmax = table.nsamp[static_cast<std::size_t>(p)];

        // n = 0: cos = 1 everywhere and the sine branch vanishes.
        double sr0 = g[0].real() + g[half].real();
        double interior = 0.0;
        for (std::size_t b = 1; b < half; ++b) interior += g[b].real();
        sr0 += 2.0 * interior;
        ops.add(static_cast<long long>(half));
        ops.mul(1);
        const double* w0 = table.row(p, 0);
        for (int q = 0; q < q_count; ++q) {
            f.power[static_cast<std::size_t>(q)] += w0[q] * sr0;
        }
        ops.mul(q_count);
        ops.add(q_count);

        for (int n = 1; n <= nmax; ++n) {
            const double step = 2.0 * std::numbers::pi * n / k;
            double sr_in = 0.0, si_in = 0.0;
            std::complex<double> w(std::cos(step), std::sin(step));
            const std::complex<double> rot = w;
            for (std::size_t b = 1; b < half; ++b) {
                sr_in += g[b].real() * w.real();
                si_in += g[b].imag() * w.imag();
                w *= rot;
                if ((b & 511u) == 0u) w = std::polar(1.0, step * static_cast<double>(b + 1));
            }
            const double nyq = (n & 1) ? -1.0 : 1.0;  // cos(pi n)
            const double sr = g[0].real() + g[half].real() * nyq + 2.0 * sr_in;
            const double si = 2.0 * si_in;  // sin terms vanish at DC and Nyquist
            ops.mul(2 * static_cast<long long>(half - 1) + 3);
            ops.add(2 * static_cast<long long>(half - 1) + 2);

            const double* wrow = table.row(p, n);
            const double nsi = static_cast<double>(n) * si;
            ops.mul(1);
            for (int q = 0; q < q_count; ++q) {
                f.power[static_cast<std::size_t>(q)] += wrow[q] * (lag[q] * sr - nsi);
            }
            ops.mul(2 * q_count);
            ops.add(2 * q_count);
        }
    }
    detail::finalize_srp_frame(f);
    return f;
}

}  // namespace detail

inline SrpFrame lc_srp_edge(const GccPhatSpectrum& gcc, const SincTableEdge& table,
                            const CandidateGrid& grid, int frame_index = 0) {
    NullOpCount ops;
    return detail::lc_srp_edge_impl(gcc, table, grid, ops, frame_index);
}

inline SrpFrame lc_srp_edge_counted(const GccPhatSpectrum& gcc, const SincTableEdge& table,
                                    const CandidateGrid& grid, OpCount& ops,
                                    int frame_index = 0) {
    return detail::lc_srp_edge_impl(gcc, table, grid, ops, frame_index);
}

enum class SrpMethod { kFd, kTd, kLc, kLcEdge };

inline SrpMethod srp_method_from_string(const std::string& s) {
    if (s == "fd") return SrpMethod::kFd;
    if (s == "td") return SrpMethod::kTd;
    if (s == "lc") return SrpMethod::kLc;
    if (s == "lc-edge" || s == "lc_edge") return SrpMethod::kLcEdge;
    throw std::invalid_argument("unknown SRP method: " + s);
}

inline std::string to_string(SrpMethod m) {
    switch (m) {
        case SrpMethod::kFd: return "fd";
        case SrpMethod::kTd: return "td";
        case SrpMethod::kLc: return "lc";
        case SrpMethod::kLcEdge: return "lc-edge";
    }
    return "?";
}

struct SrpPipeline {
    MicArray array;
    CandidateGrid grid;
    FrameSpec frame;
    int fs = 16000;
    SrpMethod method = SrpMethod::kLcEdge;
    double eps = 1e-12;
    int threads = 1;

    TdoaTable tdoa;
    SampleBounds bounds;
    SincTableEdge table;

    void prepare() {
        array.validate();
        frame.validate();
        tdoa = tdoa_table(array, grid);
        bounds = n_samp(array, fs);
        if (method == SrpMethod::kLcEdge) {
            table = build_sinc_table_edge(tdoa, bounds, grid, frame.window_len, fs);
        }
    }

    SrpFrame run_frame(const SpectralFrame& sf) const {
        const GccPhatSpectrum g = gcc_phat(sf, array, eps);
        switch (method) {
            case SrpMethod::kFd: return fd_srp(g, tdoa, grid, fs, sf.frame_index);
            case SrpMethod::kTd: return td_srp(g, tdoa, grid, fs, sf.frame_index);
            case SrpMethod::kLc: return lc_srp(g, tdoa, bounds, grid, fs, sf.frame_index);
            case SrpMethod::kLcEdge: return lc_srp_edge(g, table, grid, sf.frame_index);
        }
        throw std::logic_error("srp: bad method");
    }
};

// One SrpFrame per windowed frame, ordered by frame index.
inline std::vector<SrpFrame> srp_sequence(const AudioClip& clip, SrpPipeline& pipe) {
    if (clip.sample_rate_hz != pipe.fs) {
        throw std::invalid_argument("srp_sequence: clip sample rate does not match config fs");
    }
    pipe.prepare();
    const std::vector<SpectralFrame> frames = stft(clip, pipe.frame);
    std::vector<SrpFrame> out(frames.size());
    const int threads = std::max(1, pipe.threads);
    if (threads == 1 || frames.size() < 2) {
        for (std::size_t t = 0; t < frames.size(); ++t) out[t] = pipe.run_frame(frames[t]);
        return out;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (frames.size() + threads - 1) / static_cast<std::size_t>(threads);
    for (int w = 0; w < threads; ++w) {
        const std::size_t lo = static_cast<std::size_t>(w) * chunk;
        const std::size_t hi = std::min(frames.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&frames, &out, &pipe, lo, hi]() {
            for (std::size_t t = lo; t < hi; ++t) out[t] = pipe.run_frame(frames[t]);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace srpedge
