#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "edarof/common.hpp"
#include "edarof/fft.hpp"
#include "edarof/metrics.hpp"
#include "edarof/prng.hpp"
#include "edarof/quantizer.hpp"

namespace edarof {

// Parametric magnitude response standing in for a measured transmitter
// curve; a two-column measured table can be loaded instead.
struct FrequencyResponse {
    enum class Kind { flat, bessel4, table };
    Kind kind = Kind::bessel4;
    double f3db_hz = 30e9;
    std::vector<std::pair<double, double>> table;  // (freq_hz, magnitude_db), sorted

    // Linear magnitude at frequency f (symmetric in f).
    double magnitude(double f_hz) const {
        const double f = std::abs(f_hz);
        switch (kind) {
            case Kind::flat:
                return 1.0;
            case Kind::bessel4: {
                // 4th-order Bessel low-pass magnitude, normalized so that
                // |H(f3db)| = 1/sqrt(2); x = 2.1139 f/f3db maps onto the
                // polynomial B4(s) = s^4 + 10s^3 + 45s^2 + 105s + 105.
                const double x = 2.1139 * f / f3db_hz;
                const double x2 = x * x;
                const double re = x2 * x2 - 45.0 * x2 + 105.0;
                const double im = 105.0 * x - 10.0 * x2 * x;
                return 105.0 / std::sqrt(re * re + im * im);
            }
            case Kind::table: {
                if (table.empty()) return 1.0;
                if (f <= table.front().first) return std::pow(10.0, table.front().second / 20.0);
                if (f >= table.back().first) return std::pow(10.0, table.back().second / 20.0);
                for (std::size_t i = 1; i < table.size(); ++i) {
                    if (f <= table[i].first) {
                        const double f0 = table[i - 1].first, f1 = table[i].first;
                        const double d0 = table[i - 1].second, d1 = table[i].second;
                        const double t = f1 > f0 ? (f - f0) / (f1 - f0) : 0.0;
                        return std::pow(10.0, (d0 + t * (d1 - d0)) / 20.0);
                    }
                }
                return 1.0;
            }
        }
        return 1.0;
    }
};

// Two-column text: frequency_hz magnitude_db, '#' comments allowed.
inline FrequencyResponse load_response_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("response table: cannot open " + path);
    FrequencyResponse r;
    r.kind = FrequencyResponse::Kind::table;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double f, db;
        if (ls >> f >> db) r.table.emplace_back(f, db);
    }
    if (r.table.size() < 2) throw ConfigError("response table: need at least 2 rows in " + path);
    std::sort(r.table.begin(), r.table.end());
    return r;
}

struct LinkToggles {
    bool tx_response = true;
    bool rapp = true;
    bool mzm = true;
    bool laser_phase_noise = true;
    bool rin = true;
    bool shot = true;
    bool thermal = true;
    bool dac = true;
    bool adc = true;
};

// Every optical/electrical impairment parameter of the back-to-back link.
struct LinkConfig {
    double enob_bits = 6.0;          // DAC and ADC
    double clip_ratio_db = 13.0;     // converter clip level above per-axis RMS
    double rapp_backoff_db = 12.0;   // input power below amplifier saturation
    double rapp_smoothness = 2.0;    // Rapp p
    double v_pi = 4.0;               // modulator half-wave voltage, volts
    double drive_rms_v = 0.3;        // per-axis RMS drive at the modulator, volts
    double pd_responsivity = 0.8;    // A/W
    double pd_dark_current = 5e-9;   // A per diode
    double pd_thermal_psd = 10e-12;  // A/sqrt(Hz) per balanced output
    double laser_wavelength_m = 1550e-9;
    double laser_linewidth_hz = 100e3;
    double rin_db_hz = -150.0;
    double rop_dbm = 0.0;            // received optical power set by the VOA
    double lo_power_dbm = 13.0;
    double lo_freq_offset_hz = 50e6; // transmitter-laser/LO detuning
    double sample_rate_hz = 70e9;    // set from the OFDM config by the harness
    FrequencyResponse tx_response{};
    LinkToggles toggles{};
};

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

// ---- converters ------------------------------------------------------------

namespace detail {

inline double axis_rms(const cvec& w, bool imag_axis) {
    if (w.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& v : w) {
        const double a = imag_axis ? v.imag() : v.real();
        acc += a * a;
    }
    return std::sqrt(acc / double(w.size()));
}

inline void quantize_axis(cvec& w, bool imag_axis, int n_levels, double clip_ratio_db) {
    const double r = axis_rms(w, imag_axis);
    if (!(r > 0.0)) return;  // silent axis passes through
    const double a = r * std::pow(10.0, clip_ratio_db / 20.0);
    const double step = 2.0 * a / double(n_levels);
    for (auto& v : w) {
        const double x = imag_axis ? v.imag() : v.real();
        const int k = midrise_index(x, n_levels, step, a, nullptr);
        const double q = -a + (double(k) + 0.5) * step;
        v = imag_axis ? cplx(v.real(), q) : cplx(q, v.imag());
    }
}

}  // namespace detail

// Clip at clip_ratio_db above the per-axis RMS, then uniform 2^enob-level
// quantization of each axis.
inline cvec dac_quantize(cvec w, double enob_bits, double clip_ratio_db) {
    const int n_levels = int(std::llround(std::exp2(enob_bits)));
    if (n_levels < 2) throw std::domain_error("dac_quantize: enob too small");
    detail::quantize_axis(w, false, n_levels, clip_ratio_db);
    detail::quantize_axis(w, true, n_levels, clip_ratio_db);
    return w;
}

inline cvec adc_quantize(cvec w, double enob_bits, double clip_ratio_db) {
    return dac_quantize(std::move(w), enob_bits, clip_ratio_db);
}

// ---- analog impairments ----------------------------------------------------

// Rapp solid-state amplifier on the complex envelope:
// |v| -> |v| / (1 + (|v|/v_sat)^(2p))^(1/(2p)), phase preserved. v_sat is set
// so the measured input power sits backoff_db below saturation.
inline cvec rapp_amplify(cvec w, double backoff_db, double p) {
    const double pin = mean_power(w);
    if (!(pin > 0.0)) return w;
    const double v_sat = std::sqrt(pin) * std::pow(10.0, backoff_db / 20.0);
    const double e = 2.0 * p;
    for (auto& v : w) {
        const double mag = std::abs(v);
        if (mag > 0.0)
            v *= 1.0 / std::pow(1.0 + std::pow(mag / v_sat, e), 1.0 / e);
    }
    return w;
}

// IQ Mach-Zehnder transfer, children at the null point, quadrature parent:
// E ~ sin(pi v_i / (2 v_pi)) + i sin(pi v_q / (2 v_pi)), times the carrier.
inline cvec iq_mzm_modulate(const std::vector<double>& v_i, const std::vector<double>& v_q,
                            double v_pi, const cvec& carrier) {
    if (v_i.size() != v_q.size() || v_i.size() != carrier.size())
        throw std::domain_error("iq_mzm_modulate: drive/carrier length mismatch");
    const double k = kPi / (2.0 * v_pi);
    cvec e(v_i.size());
    for (std::size_t n = 0; n < e.size(); ++n)
        e[n] = cplx(std::sin(k * v_i[n]), std::sin(k * v_q[n])) * carrier[n];
    return e;
}

// Unit-mean-power laser field: Wiener phase walk with per-sample increment
// variance 2 pi linewidth Ts, and white intensity fluctuations at the RIN
// PSD (one-sided, relative to the mean power).
inline cvec laser_field(std::size_t n, const LinkConfig& cfg, std::uint64_t seed) {
    GaussianSampler g(seed);
    const double ts = 1.0 / cfg.sample_rate_hz;
    const bool pn = cfg.toggles.laser_phase_noise && cfg.laser_linewidth_hz > 0.0;
    const bool rin = cfg.toggles.rin;
    const double pn_sigma = pn ? std::sqrt(2.0 * kPi * cfg.laser_linewidth_hz * ts) : 0.0;
    const double rin_var = rin ? std::pow(10.0, cfg.rin_db_hz / 10.0) * cfg.sample_rate_hz / 2.0 : 0.0;
    const double rin_sigma = std::sqrt(rin_var);

    cvec field(n);
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pn) phase += pn_sigma * g.next();
        double amp = 1.0;
        if (rin) amp = std::sqrt(std::max(0.0, 1.0 + rin_sigma * g.next()));
        field[i] = std::polar(amp, phase);
    }
    return field;
}

// Balanced I/Q coherent detection: y = R * E_s * conj(E_lo), plus shot noise
// 2qIB per diode (two diodes per output), thermal noise at the configured
// PSD per output, dark current added to each diode's mean. B = fs/2.
inline cvec coherent_receive(const cvec& sig_field, const cvec& lo_field,
                             const LinkConfig& cfg, std::uint64_t seed) {
    if (sig_field.size() != lo_field.size())
        throw std::domain_error("coherent_receive: field length mismatch");
    const double r = cfg.pd_responsivity;
    cvec y(sig_field.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = r * sig_field[i] * std::conj(lo_field[i]);

    const double bw = cfg.sample_rate_hz / 2.0;
    const double p_s = mean_power(sig_field);
    const double p_lo = mean_power(lo_field);
    const double i_diode = r * (p_s + p_lo) / 4.0 + cfg.pd_dark_current;
    const double q_e = 1.602176634e-19;
    double var_per_axis = 0.0;
    if (cfg.toggles.shot) var_per_axis += 2.0 * q_e * (2.0 * i_diode) * bw;
    if (cfg.toggles.thermal) var_per_axis += cfg.pd_thermal_psd * cfg.pd_thermal_psd * bw;
    if (var_per_axis > 0.0) {
        GaussianSampler g(seed);
        const double sigma = std::sqrt(var_per_axis);
        for (auto& v : y) v += cplx(sigma * g.next(), sigma * g.next());
    }
    return y;
}

// Analytic variance of the additive receiver noise (per complex sample) for
// the same operating point; used by the noise-budget checks.
inline double coherent_noise_variance(double p_sig_w, double p_lo_w, const LinkConfig& cfg) {
    const double bw = cfg.sample_rate_hz / 2.0;
    const double i_diode = cfg.pd_responsivity * (p_sig_w + p_lo_w) / 4.0 + cfg.pd_dark_current;
    const double q_e = 1.602176634e-19;
    double var_per_axis = 0.0;
    if (cfg.toggles.shot) var_per_axis += 2.0 * q_e * (2.0 * i_diode) * bw;
    if (cfg.toggles.thermal) var_per_axis += cfg.pd_thermal_psd * cfg.pd_thermal_psd * bw;
    return 2.0 * var_per_axis;
}

// ---- spectral shaping ------------------------------------------------------

namespace detail {

template <typename Gain>
inline cvec apply_spectral_gain(const cvec& w, double fs, Gain gain) {
    if (w.empty()) return w;
    const std::size_t n = next_pow2(w.size());
    cvec x(n, cplx(0.0, 0.0));
    std::copy(w.begin(), w.end(), x.begin());
    fft_inplace(x, false);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = (k <= n / 2 ? double(k) : double(k) - double(n)) * fs / double(n);
        x[k] *= gain(f);
    }
    fft_inplace(x, true);
    cvec out(w.size());
    const double s = 1.0 / double(n);
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = x[i] * s;
    return out;
}

}  // namespace detail

// Zero-phase magnitude filter: the bandwidth limitation without group delay,
// so frame alignment is preserved ahead of synchronization.
inline cvec apply_tx_response(const cvec& w, const FrequencyResponse& resp, double fs) {
    return detail::apply_spectral_gain(w, fs, [&resp](double f) { return resp.magnitude(f); });
}

inline constexpr double kPreEmphasisClampDb = 15.0;

// Zero-forcing pre-emphasis: spectrum multiplied by the inverse response,
// clamped to bound noise enhancement.
inline cvec pre_emphasize(const cvec& w, const FrequencyResponse& resp, double fs,
                          double clamp_db = kPreEmphasisClampDb) {
    const double max_gain = std::pow(10.0, clamp_db / 20.0);
    return detail::apply_spectral_gain(w, fs, [&resp, max_gain](double f) {
        const double m = resp.magnitude(f);
        if (!(m > 0.0)) return max_gain;
        return std::min(1.0 / m, max_gain);
    });
}

// ---- the composite link ----------------------------------------------------

// Optical back-to-back channel. Stage order: tx bandwidth response ->
// Rapp amplification of the drives -> IQ-MZM with the transmit laser ->
// VOA to the configured received power -> balanced coherent receiver with
// an independent LO (detuned by lo_freq_offset_hz) -> ADC. Every stage is
// independently toggleable; with all optical-section toggles off the field
// conversion itself is skipped so the electrical waveform passes unchanged.
inline cvec run_ob2b(const cvec& tx, const LinkConfig& cfg, std::uint64_t seed) {
    cvec w = tx;
    const double fs = cfg.sample_rate_hz;

    if (cfg.toggles.tx_response && cfg.tx_response.kind != FrequencyResponse::Kind::flat)
        w = apply_tx_response(w, cfg.tx_response, fs);

    if (cfg.toggles.rapp)
        w = rapp_amplify(std::move(w), cfg.rapp_backoff_db, cfg.rapp_smoothness);

    const bool optical = cfg.toggles.mzm || cfg.toggles.laser_phase_noise ||
                         cfg.toggles.rin || cfg.toggles.shot || cfg.toggles.thermal;
    if (optical) {
        const std::size_t n = w.size();
        // Drive scaling to the configured modulator swing.
        const double ra = rms_axis(w);
        const double drive_gain = ra > 0.0 ? cfg.drive_rms_v / ra : 1.0;
        cvec field;
        if (cfg.toggles.mzm) {
            std::vector<double> vi(n), vq(n);
            for (std::size_t i = 0; i < n; ++i) {
                vi[i] = w[i].real() * drive_gain;
                vq[i] = w[i].imag() * drive_gain;
            }
            field = iq_mzm_modulate(vi, vq, cfg.v_pi,
                                    laser_field(n, cfg, derive_seed(seed, 1)));
        } else {
            field.resize(n);
            const cvec carrier = laser_field(n, cfg, derive_seed(seed, 1));
            for (std::size_t i = 0; i < n; ++i) field[i] = w[i] * drive_gain * carrier[i];
        }

        // VOA sets the received optical power.
        const double p_field = mean_power(field);
        if (p_field > 0.0) {
            const double voa = std::sqrt(dbm_to_watt(cfg.rop_dbm) / p_field);
            for (auto& v : field) v *= voa;
        }

        // Independent LO with its own phase noise and a frequency detuning.
        LinkConfig lo_cfg = cfg;
        lo_cfg.toggles.rin = false;  // LO RIN is suppressed by balanced detection
        cvec lo = laser_field(n, lo_cfg, derive_seed(seed, 2));
        const double lo_amp = std::sqrt(dbm_to_watt(cfg.lo_power_dbm));
        const double dphi = -2.0 * kPi * cfg.lo_freq_offset_hz / fs;
        for (std::size_t i = 0; i < n; ++i)
            lo[i] *= std::polar(lo_amp, dphi * double(i));

        w = coherent_receive(field, lo, cfg, derive_seed(seed, 3));
    }

    if (cfg.toggles.adc) w = adc_quantize(std::move(w), cfg.enob_bits, cfg.clip_ratio_db);
    return w;
}

}  // namespace edarof
