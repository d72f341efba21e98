#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "edarof/common.hpp"
#include "edarof/fft.hpp"
#include "edarof/metrics.hpp"
#include "edarof/ofdm.hpp"

namespace edarof {

// Adds an out-of-band continuous-wave tone at pilot_offset_hz, scaled to
// pilot_power_ratio_db relative to the waveform power. The receiver tracks
// this tone to estimate frequency offset and common carrier phase.
inline cvec insert_pilot(cvec w, const OfdmConfig& cfg) {
    const double fs = cfg.sample_rate_hz();
    const double f_p = cfg.pilot_offset_hz;
    const double half_bw = cfg.pilot_filter_bw_hz / 2.0;
    const double band_edge = (1.0 + cfg.rolloff) * cfg.symbol_rate_hz() / 2.0;
    if (!(f_p - half_bw > band_edge))
        throw ConfigError("insert_pilot: pilot band overlaps the signal band");
    if (!(f_p + half_bw < fs / 2.0))
        throw ConfigError("insert_pilot: pilot band exceeds Nyquist");

    const double p_w = mean_power(w);
    const double a_p = std::sqrt(p_w * std::pow(10.0, cfg.pilot_power_ratio_db / 10.0));
    const double dphi = 2.0 * kPi * f_p / fs;
    for (std::size_t n = 0; n < w.size(); ++n)
        w[n] += std::polar(a_p, dphi * double(n));
    return w;
}

// Pilot-aided frequency-offset correction and carrier-phase recovery.
//
// 1. Coarse: locate the strongest bin within +-max(500 MHz, filter bw) of
//    the configured pilot frequency.
// 2. Extract: zero-phase brickwall of width pilot_filter_bw_hz around the
//    located tone -> complex pilot trajectory p[n].
// 3. Correct: w[n] * conj(p[n]/|p[n]|) * exp(+j 2 pi f_p n / fs). The
//    conjugate strips the tone ramp, the frequency error, and the common
//    laser phase; the final ramp restores the known tone frequency so the
//    signal returns to baseband with zero residual offset.
//
// If no tone is found (pilot power below -100 dB of the waveform) the input
// is returned unchanged.
inline cvec pilot_foc_cpr(const cvec& w, const OfdmConfig& cfg) {
    if (w.empty()) return w;
    const double fs = cfg.sample_rate_hz();
    const double f_p = cfg.pilot_offset_hz;
    const std::size_t n = next_pow2(w.size());
    const double bin_hz = fs / double(n);

    cvec spec(n, cplx(0.0, 0.0));
    std::copy(w.begin(), w.end(), spec.begin());
    fft_inplace(spec, false);

    auto bin_of = [&](double f) {
        double b = f / bin_hz;
        if (b < 0.0) b += double(n);
        return std::size_t(std::llround(b)) % n;
    };
    const double search_half = std::max(500e6, cfg.pilot_filter_bw_hz);
    const std::size_t lo = bin_of(f_p - search_half);
    const std::size_t hi = bin_of(f_p + search_half);
    std::size_t peak = lo;
    double peak_mag = 0.0;
    for (std::size_t k = lo; k <= hi && k < n; ++k) {
        const double m = std::norm(spec[k]);
        if (m > peak_mag) { peak_mag = m; peak = k; }
    }

    // Tone-presence gate: compare in-bin power against total power.
    double total = 0.0;
    for (const auto& v : spec) total += std::norm(v);
    if (!(total > 0.0) || peak_mag < 1e-10 * total) return w;

    const std::size_t half_bins = std::size_t(cfg.pilot_filter_bw_hz / 2.0 / bin_hz);
    cvec tone(n, cplx(0.0, 0.0));
    for (std::size_t d = 0; d <= half_bins; ++d) {
        const std::size_t kp = (peak + d) % n;
        const std::size_t km = (peak + n - d) % n;
        tone[kp] = spec[kp];
        if (km != kp) tone[km] = spec[km];
    }
    fft_inplace(tone, true);
    const double inv_n = 1.0 / double(n);

    cvec out(w.size());
    const double dphi = 2.0 * kPi * f_p / fs;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const cplx p = tone[i] * inv_n;
        const double mag = std::abs(p);
        const cplx unit = mag > 1e-30 ? p / mag : cplx(1.0, 0.0);
        out[i] = w[i] * std::conj(unit) * std::polar(1.0, dphi * double(i));
    }
    return out;
}

}  // namespace edarof
