#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace srpedge {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

// Iterative radix-2 Cooley-Tukey. Length must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("fft: length must be a power of two");
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= s;
    }
}

}  // namespace detail

// Forward transform of a real frame; returns K/2+1 bins. Bin 0 and bin K/2
// come out with exactly zero imaginary part.
inline std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
    const std::size_t k = x.size();
    if (!is_power_of_two(k)) {
        throw std::invalid_argument("rfft: frame length must be a power of two");
    }
    std::vector<std::complex<double>> a(x.begin(), x.end());
    detail::fft_inplace(a, false);
    std::vector<std::complex<double>> bins(k / 2 + 1);
    for (std::size_t i = 0; i <= k / 2; ++i) bins[i] = a[i];
    bins[0] = {bins[0].real(), 0.0};
    bins[k / 2] = {bins[k / 2].real(), 0.0};
    return bins;
}

// Inverse of rfft. `bins` holds K/2+1 values for an even length K.
inline std::vector<double> irfft(const std::vector<std::complex<double>>& bins, std::size_t k) {
    if (!is_power_of_two(k)) {
        throw std::invalid_argument("irfft: length must be a power of two");
    }
    if (bins.size() != k / 2 + 1) {
        throw std::invalid_argument("irfft: expected K/2+1 bins");
    }
    std::vector<std::complex<double>> a(k);
    for (std::size_t i = 0; i <= k / 2; ++i) a[i] = bins[i];
    for (std::size_t i = k / 2 + 1; i < k; ++i) a[i] = std::conj(bins[k - i]);
    detail::fft_inplace(a, true);
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = a[i].real();
    return out;
}

// Unscaled conjugate-symmetric inverse: r[l] = sum_k G_full[k] e^{+j 2pi k l / K}.
// This is K times the irfft and is the raw time-domain GCC used by TD-SRP.
inline std::vector<double> irfft_unscaled(const std::vector<std::complex<double>>& bins,
                                          std::size_t k) {
    std::vector<double> r = irfft(bins, k);
    for (auto& v : r) v *= static_cast<double>(k);
    return r;
}

// Linear convolution via zero-padded FFT.
inline std::vector<double> fft_convolve(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    std::size_t n = 1;
    while (n < out_len) n <<= 1;
    std::vector<std::complex<double>> fa(n), fb(n);
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    detail::fft_inplace(fa, false);
    detail::fft_inplace(fb, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    detail::fft_inplace(fa, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
    return out;
}

}  // namespace srpedge
