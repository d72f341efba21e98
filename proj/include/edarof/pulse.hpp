#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "edarof/common.hpp"
#include "edarof/fft.hpp"
#include "edarof/ofdm.hpp"

namespace edarof {

inline constexpr std::size_t kRrcTaps = 1025;

namespace detail {

// Root-raised-cosine impulse response at time t in symbol units.
inline double rrc_value(double t, double beta) {
    if (std::abs(t) < 1e-12) return 1.0 - beta + 4.0 * beta / kPi;
    const double tb = 4.0 * beta * t;
    if (std::abs(std::abs(tb) - 1.0) < 1e-9) {
        // Removable singularity at t = +-1/(4 beta).
        const double a = kPi / (4.0 * beta);
        return (beta / std::sqrt(2.0)) *
               ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
    }
    return (std::sin(kPi * t * (1.0 - beta)) + tb * std::cos(kPi * t * (1.0 + beta))) /
           (kPi * t * (1.0 - tb * tb));
}

}  // namespace detail

// Odd-length unit-energy RRC taps sampled at sps points per symbol.
inline std::vector<double> rrc_taps(std::size_t n_taps, double rolloff, int sps) {
    if (n_taps % 2 == 0) throw std::domain_error("rrc_taps: tap count must be odd");
    if (!(rolloff > 0.0 && rolloff <= 1.0)) throw std::domain_error("rrc_taps: rolloff out of range");
    std::vector<double> h(n_taps);
    const double center = double(n_taps - 1) / 2.0;
    double energy = 0.0;
    for (std::size_t k = 0; k < n_taps; ++k) {
        h[k] = detail::rrc_value((double(k) - center) / double(sps), rolloff);
        energy += h[k] * h[k];
    }
    const double s = 1.0 / std::sqrt(energy);
    for (auto& v : h) v *= s;
    return h;
}

inline cvec taps_to_cvec(const std::vector<double>& taps) {
    cvec out(taps.size());
    for (std::size_t i = 0; i < taps.size(); ++i) out[i] = cplx(taps[i], 0.0);
    return out;
}

inline cvec upsample(const cvec& x, int sps) {
    if (sps < 1) throw std::domain_error("upsample: sps must be >= 1");
    cvec out(x.size() * std::size_t(sps), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) out[i * std::size_t(sps)] = x[i];
    return out;
}

// Upsample then full convolution with the RRC; output carries the filter's
// (n_taps-1)/2-sample transient on both ends.
inline cvec pulse_shape(const cvec& symbols, const OfdmConfig& cfg,
                        std::size_t n_taps = kRrcTaps) {
    const auto taps = taps_to_cvec(rrc_taps(n_taps, cfg.rolloff, cfg.sps));
    return fft_convolve(upsample(symbols, cfg.sps), taps);
}

// Second RRC pass and decimation at symbol instants, compensating the
// accumulated two-filter delay; shape + matched-filter is Nyquist.
inline cvec matched_filter(const cvec& waveform, const OfdmConfig& cfg,
                           std::size_t n_taps = kRrcTaps) {
    const auto taps = taps_to_cvec(rrc_taps(n_taps, cfg.rolloff, cfg.sps));
    const cvec y = fft_convolve(waveform, taps);
    const std::size_t delay = n_taps - 1;  // both filters, at sample rate
    cvec out;
    if (y.size() <= delay) return out;
    out.reserve((y.size() - delay) / std::size_t(cfg.sps) + 1);
    for (std::size_t i = delay; i < y.size(); i += std::size_t(cfg.sps))
        out.push_back(y[i]);
    return out;
}

// Same-length zero-phase RRC filtering (the receiver's matched filter before
// the half-symbol-spaced equalizer, which wants the full-rate stream).
inline cvec matched_filter_full_rate(const cvec& waveform, const OfdmConfig& cfg,
                                     std::size_t n_taps = kRrcTaps) {
    return filter_zero_phase(waveform, taps_to_cvec(rrc_taps(n_taps, cfg.rolloff, cfg.sps)));
}

}  // namespace edarof
