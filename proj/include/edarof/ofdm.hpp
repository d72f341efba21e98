#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "edarof/common.hpp"
#include "edarof/fft.hpp"
#include "edarof/prng.hpp"

namespace edarof {

// Wireless-signal parameters. The symbol rate is derived from the stated
// occupied bandwidth: Rs = bandwidth/(1+rolloff) = 35 GBd at 38.5 GHz and
// rolloff 0.1; the simulation rate is sps*Rs = 70 GSa/s.
struct OfdmConfig {
    std::size_t fft_size = 1024;
    int qam_order = 1024;
    std::size_t n_symbols = std::size_t(1) << 16;  // total payload QAM symbols
    std::size_t preamble_len = 64;                 // OFDM symbols for sync + EQ training
    double rolloff = 0.1;
    int sps = 2;
    double signal_bandwidth_hz = 38.5e9;
    // The RF pilot rides between the signal band edge and Nyquist; extraction
    // uses a zero-phase band-pass of pilot_filter_bw_hz around the located tone.
    double pilot_offset_hz = 25e9;
    double pilot_power_ratio_db = -15.0;
    double pilot_filter_bw_hz = 500e6;
    double clip_ratio_db = 13.0; // converter clip level above per-axis RMS
    std::uint64_t preamble_seed = 0x70696C6F745F3031ULL;  // fixed: preamble is known at both ends

    double symbol_rate_hz() const { return signal_bandwidth_hz / (1.0 + rolloff); }
    double sample_rate_hz() const { return symbol_rate_hz() * double(sps); }
};

// ---- square-Gray QAM -------------------------------------------------------

namespace detail {

inline int ilog2(std::uint64_t v) {
    int n = 0;
    while (v > 1) {
        v >>= 1;
        ++n;
    }
    return n;
}

inline unsigned gray_encode(unsigned v) { return v ^ (v >> 1); }

inline unsigned gray_decode(unsigned g) {
    unsigned v = 0;
    for (; g; g >>= 1) v ^= g;
    return v;
}

// Unit-average-power axis scale: per-axis mean level power is (L^2-1)/3.
inline double qam_axis_scale(int levels_per_axis) {
    const double l = double(levels_per_axis);
    return 1.0 / std::sqrt(2.0 * (l * l - 1.0) / 3.0);
}

}  // namespace detail

// Square QAM with per-axis Gray labeling, constellation normalized to unit
// average power. Bits are consumed MSB-first: I-axis bits then Q-axis bits.
inline cvec qam_map(const std::vector<std::uint8_t>& bits, int order) {
    const int total_bits = detail::ilog2(std::uint64_t(order));
    if (order < 4 || (1 << total_bits) != order || total_bits % 2 != 0)
        throw std::domain_error("qam_map: order must be a square power of two");
    const int bpa = total_bits / 2;
    if (bits.size() % std::size_t(total_bits) != 0)
        throw std::domain_error("qam_map: bit count must be a multiple of bits per symbol");
    const int levels = 1 << bpa;
    const double scale = detail::qam_axis_scale(levels);

    cvec out(bits.size() / std::size_t(total_bits));
    std::size_t b = 0;
    for (auto& sym : out) {
        unsigned gi = 0, gq = 0;
        for (int k = 0; k < bpa; ++k) gi = (gi << 1) | (bits[b++] & 1u);
        for (int k = 0; k < bpa; ++k) gq = (gq << 1) | (bits[b++] & 1u);
        const int li = int(detail::gray_decode(gi));
        const int lq = int(detail::gray_decode(gq));
        sym = cplx(double(2 * li - (levels - 1)) * scale,
                   double(2 * lq - (levels - 1)) * scale);
    }
    return out;
}

inline std::vector<std::uint8_t> qam_demap(const cvec& symbols, int order) {
    const int total_bits = detail::ilog2(std::uint64_t(order));
    if (order < 4 || (1 << total_bits) != order || total_bits % 2 != 0)
        throw std::domain_error("qam_demap: order must be a square power of two");
    const int bpa = total_bits / 2;
    const int levels = 1 << bpa;
    const double scale = detail::qam_axis_scale(levels);

    std::vector<std::uint8_t> bits(symbols.size() * std::size_t(total_bits));
    std::size_t b = 0;
    auto slice_axis = [&](double v) {
        int l = int(std::lround((v / scale + double(levels - 1)) / 2.0));
        if (l < 0) l = 0;
        if (l >= levels) l = levels - 1;
        return detail::gray_encode(unsigned(l));
    };
    for (const auto& sym : symbols) {
        const unsigned gi = slice_axis(sym.real());
        const unsigned gq = slice_axis(sym.imag());
        for (int k = bpa - 1; k >= 0; --k) bits[b++] = std::uint8_t((gi >> k) & 1u);
        for (int k = bpa - 1; k >= 0; --k) bits[b++] = std::uint8_t((gq >> k) & 1u);
    }
    return bits;
}

// ---- OFDM ------------------------------------------------------------------

// Column-parallelized unitary IFFT, one block per OFDM symbol; no cyclic
// prefix (the link is a single-span back-to-back connection).
inline cvec ofdm_modulate(const cvec& symbols, const OfdmConfig& cfg) {
    if (cfg.fft_size == 0 || symbols.size() % cfg.fft_size != 0)
        throw std::domain_error("ofdm_modulate: symbol count must divide into FFT blocks");
    cvec out;
    out.reserve(symbols.size());
    for (std::size_t off = 0; off < symbols.size(); off += cfg.fft_size) {
        cvec block(symbols.begin() + std::ptrdiff_t(off),
                   symbols.begin() + std::ptrdiff_t(off + cfg.fft_size));
        block = ifft_unitary(std::move(block));
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

inline cvec ofdm_demodulate(const cvec& samples, const OfdmConfig& cfg) {
    if (cfg.fft_size == 0 || samples.size() % cfg.fft_size != 0)
        throw std::domain_error("ofdm_demodulate: sample count must divide into FFT blocks");
    cvec out;
    out.reserve(samples.size());
    for (std::size_t off = 0; off < samples.size(); off += cfg.fft_size) {
        cvec block(samples.begin() + std::ptrdiff_t(off),
                   samples.begin() + std::ptrdiff_t(off + cfg.fft_size));
        block = fft_unitary(std::move(block));
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

// ---- known sequences -------------------------------------------------------

inline std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed) {
    std::vector<std::uint8_t> bits(n);
    Xorshift64Star rng(seed);
    std::uint64_t word = 0;
    int left = 0;
    for (auto& b : bits) {
        if (left == 0) {
            word = rng.next();
            left = 64;
        }
        b = std::uint8_t(word & 1u);
        word >>= 1;
        --left;
    }
    return bits;
}

// Pseudo-random QPSK subcarriers for the preamble: robust correlation at low
// SNR, unit average power. Known at both ends via the fixed seed.
inline cvec preamble_symbols(const OfdmConfig& cfg) {
    const std::size_t n = cfg.preamble_len * cfg.fft_size;
    cvec syms(n);
    Xorshift64Star rng(cfg.preamble_seed);
    const double s = 0.7071067811865476;
    for (auto& v : syms) {
        const std::uint64_t r = rng.next();
        v = cplx((r & 1u) ? s : -s, (r & 2u) ? s : -s);
    }
    return syms;
}

// Symbol-rate preamble waveform (the OFDM time samples).
inline cvec preamble_waveform(const OfdmConfig& cfg) {
    return ofdm_modulate(preamble_symbols(cfg), cfg);
}

}  // namespace edarof
