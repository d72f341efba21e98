#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <unordered_map>

#include "edarof/common.hpp"

// Iterative radix-2 FFT over power-of-two lengths. Hand-rolled on purpose:
// every transform in this project is a power of two, and the sweep's
// byte-identical-output requirement needs results that do not depend on a
// planner's algorithm choice or on how many threads are running.

namespace edarof {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

namespace detail {

// Per-thread twiddle cache: w[k] = exp(-i 2 pi k / n) for k < n/2.
inline const std::vector<cplx>& twiddles(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::vector<cplx>> cache;
    auto& w = cache[n];
    if (w.size() != n / 2) {
        w.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
            w[k] = std::polar(1.0, -2.0 * kPi * double(k) / double(n));
    }
    return w;
}

}  // namespace detail

// In-place decimation-in-time transform; inverse=true conjugates the kernel
// and applies no scaling (callers choose their normalization).
inline void fft_inplace(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto& w = detail::twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx tw = w[k * step];
                if (inverse) tw = std::conj(tw);
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * tw;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

inline cvec fft(cvec a) {
    fft_inplace(a, false);
    return a;
}

inline cvec ifft(cvec a) {
    fft_inplace(a, true);
    const double s = a.empty() ? 1.0 : 1.0 / double(a.size());
    for (auto& v : a) v *= s;
    return a;
}

// Unitary pair (1/sqrt(N) both directions): preserves per-sample power
// between domains, which the OFDM mapper relies on.
inline cvec fft_unitary(cvec a) {
    fft_inplace(a, false);
    const double s = a.empty() ? 1.0 : 1.0 / std::sqrt(double(a.size()));
    for (auto& v : a) v *= s;
    return a;
}

inline cvec ifft_unitary(cvec a) {
    fft_inplace(a, true);
    const double s = a.empty() ? 1.0 : 1.0 / std::sqrt(double(a.size()));
    for (auto& v : a) v *= s;
    return a;
}

// Linear convolution via zero-padded FFT; output length |a| + |b| - 1.
inline cvec fft_convolve(const cvec& a, const cvec& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(out_len);
    cvec fa(n), fb(n);
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fft_inplace(fa, true);
    cvec out(out_len);
    const double s = 1.0 / double(n);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i] * s;
    return out;
}

// Same-length filtering with an odd-length symmetric kernel; the
// (taps-1)/2 transient is trimmed from both ends so the filter adds no delay.
inline cvec filter_zero_phase(const cvec& x, const cvec& taps) {
    if (taps.size() % 2 == 0) throw std::invalid_argument("filter_zero_phase: taps must be odd-length");
    if (x.empty()) return {};
    const cvec y = fft_convolve(x, taps);
    const std::size_t half = taps.size() / 2;
    return cvec(y.begin() + half, y.begin() + half + x.size());
}

}  // namespace edarof
