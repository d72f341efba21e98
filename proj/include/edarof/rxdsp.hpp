#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "edarof/common.hpp"
#include "edarof/fft.hpp"
#include "edarof/metrics.hpp"

namespace edarof {

// Gram-Schmidt orthonormalization of the received I/Q rails: removes
// quadrature skew and rail gain imbalance, and normalizes the waveform to
// unit mean power. I is taken as the reference rail.
inline cvec gram_schmidt_orthonormalize(const cvec& w) {
    if (w.empty()) throw std::domain_error("gram_schmidt_orthonormalize: empty input");
    double pii = 0.0, pqq = 0.0, piq = 0.0;
    for (const auto& v : w) {
        pii += v.real() * v.real();
        pqq += v.imag() * v.imag();
        piq += v.real() * v.imag();
    }
    const double inv_n = 1.0 / double(w.size());
    pii *= inv_n;
    pqq *= inv_n;
    piq *= inv_n;
    if (!(pii > 0.0)) throw std::domain_error("gram_schmidt_orthonormalize: zero-energy I rail");

    const double i_scale = 1.0 / std::sqrt(pii);
    const double rho = piq / pii;                   // projection of Q onto I
    const double q_res_power = pqq - piq * piq / pii;
    if (!(q_res_power > 0.0)) throw std::domain_error("gram_schmidt_orthonormalize: degenerate Q rail");
    const double q_scale = 1.0 / std::sqrt(q_res_power);

    cvec out(w.size());
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    for (std::size_t n = 0; n < w.size(); ++n) {
        const double i = w[n].real();
        const double q = w[n].imag() - rho * i;
        out[n] = cplx(i * i_scale, q * q_scale) * inv_sqrt2;
    }
    return out;
}

// Normalized cross-correlation frame synchronizer. Returns the sample
// offset of `ref` inside `wave`; throws SyncError when the best normalized
// correlation falls below the detection threshold.
inline std::size_t synchronize(const cvec& wave, const cvec& ref, double threshold = 0.5) {
    if (ref.empty() || wave.size() < ref.size())
        throw SyncError("synchronize: waveform shorter than reference");

    // Cross-correlation via FFT: c[d] = sum_n wave[d+n] conj(ref[n]).
    const std::size_t n_lags = wave.size() - ref.size() + 1;
    const std::size_t nfft = next_pow2(wave.size() + ref.size());
    cvec a(nfft, cplx(0.0, 0.0)), b(nfft, cplx(0.0, 0.0));
    std::copy(wave.begin(), wave.end(), a.begin());
    for (std::size_t i = 0; i < ref.size(); ++i) b[i] = std::conj(ref[i]);
    std::reverse(b.begin(), b.begin() + ref.size());
    fft_inplace(a, false);
    fft_inplace(b, false);
    for (std::size_t k = 0; k < nfft; ++k) a[k] *= b[k];
    fft_inplace(a, true);
    // a[d + ref_len - 1] / nfft now holds c[d].

    // Sliding window energy of the waveform via prefix sums.
    std::vector<double> prefix(wave.size() + 1, 0.0);
    for (std::size_t i = 0; i < wave.size(); ++i)
        prefix[i + 1] = prefix[i] + std::norm(wave[i]);
    double e_ref = 0.0;
    for (const auto& v : ref) e_ref += std::norm(v);
    if (!(e_ref > 0.0)) throw SyncError("synchronize: zero-energy reference");

    const double inv_nfft = 1.0 / double(nfft);
    double best = -1.0;
    std::size_t best_d = 0;
    for (std::size_t d = 0; d < n_lags; ++d) {
        const double e_win = prefix[d + ref.size()] - prefix[d];
        if (!(e_win > 0.0)) continue;
        const double c = std::abs(a[d + ref.size() - 1]) * inv_nfft;
        const double metric = c / std::sqrt(e_win * e_ref);
        if (metric > best) { best = metric; best_d = d; }
    }
    if (best < threshold)
        throw SyncError("synchronize: correlation peak " + std::to_string(best) +
                        " below threshold " + std::to_string(threshold));
    return best_d;
}

struct LmsConfig {
    std::size_t n_taps = 31;   // odd; fractionally spaced at sps samples/symbol
    double step_size = 1e-3;
    std::size_t sps = 2;
    std::size_t divergence_blocks = 8;    // consecutive rising MSE blocks
    std::size_t block_len = 1024;         // symbols per MSE block
    double final_mse_limit = 0.1;
};

// Fractionally spaced data-aided LMS equalizer. Taps are adapted over the
// training reference, then frozen; the output is produced at symbol rate
// for the requested payload span. `offset` marks the first sample of the
// training sequence inside `wave`, as found by synchronize(). Throws
// EqDivergenceError when adaptation blows up. When `taps_out` is given the
// converged taps are stored there (before the final-MSE gate, so they are
// observable even on failure).
inline cvec lms_equalize(const cvec& wave, std::size_t offset, const cvec& training,
                         std::size_t n_payload, const LmsConfig& cfg = {},
                         cvec* taps_out = nullptr) {
    if (cfg.n_taps % 2 == 0) throw std::domain_error("lms_equalize: tap count must be odd");
    if (training.empty()) throw std::domain_error("lms_equalize: empty training sequence");
    const std::size_t half = cfg.n_taps / 2;
    const std::size_t n_total = training.size() + n_payload;

    // Symbol k reads wave[base + k*sps .. base + k*sps + n_taps). The center
    // tap then aligns with wave[offset + k*sps].
    if (offset < half) throw SyncError("lms_equalize: offset leaves no room for taps");
    const std::size_t base = offset - half;
    if (base + (n_total - 1) * cfg.sps + cfg.n_taps > wave.size())
        throw SyncError("lms_equalize: waveform too short for requested span");

    cvec w_taps(cfg.n_taps, cplx(0.0, 0.0));
    w_taps[half] = cplx(1.0, 0.0);

    auto filter_at = [&](std::size_t k) {
        cplx acc(0.0, 0.0);
        const std::size_t s = base + k * cfg.sps;
        for (std::size_t i = 0; i < cfg.n_taps; ++i) acc += w_taps[i] * wave[s + i];
        return acc;
    };

    // Train.
    double block_acc = 0.0;
    std::size_t block_cnt = 0, rising = 0;
    double prev_block = -1.0, last_block = 0.0;
    for (std::size_t k = 0; k < training.size(); ++k) {
        const cplx y = filter_at(k);
        const cplx e = training[k] - y;
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
            throw EqDivergenceError("lms_equalize: non-finite error during training");
        const std::size_t s = base + k * cfg.sps;
        for (std::size_t i = 0; i < cfg.n_taps; ++i)
            w_taps[i] += cfg.step_size * e * std::conj(wave[s + i]);

        block_acc += std::norm(e);
        if (++block_cnt == cfg.block_len) {
            const double mse = block_acc / double(cfg.block_len);
            rising = (prev_block >= 0.0 && mse > prev_block) ? rising + 1 : 0;
            if (rising >= cfg.divergence_blocks)
                throw EqDivergenceError("lms_equalize: training MSE rising over " +
                                        std::to_string(cfg.divergence_blocks) + " blocks");
            prev_block = mse;
            last_block = mse;
            block_acc = 0.0;
            block_cnt = 0;
        }
    }
    if (block_cnt > 0) last_block = block_acc / double(block_cnt);
    if (taps_out) *taps_out = w_taps;
    if (training.size() >= cfg.block_len && last_block >= cfg.final_mse_limit)
        throw EqDivergenceError("lms_equalize: post-training MSE " +
                                std::to_string(last_block) + " above limit");

    // Frozen-tap payload pass.
    cvec out(n_payload);
    for (std::size_t k = 0; k < n_payload; ++k) out[k] = filter_at(training.size() + k);
    return out;
}

}  // namespace edarof
