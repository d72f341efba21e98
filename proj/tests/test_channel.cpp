#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "edarof/edarof.hpp"

using namespace edarof;

namespace {

cvec full_scale_sine(std::size_t n) {
    cvec x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = cplx(std::sin(2.0 * kPi * 0.01234567 * double(i)), 0.0);
    return x;
}

double sqnr_db(const cvec& in, const cvec& out) {
    double sig = 0.0, err = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        sig += std::norm(in[i]);
        err += std::norm(out[i] - in[i]);
    }
    return 10.0 * std::log10(sig / err);
}

cvec gaussian_signal(std::size_t n, std::uint64_t seed) {
    GaussianSampler g(seed);
    cvec x(n);
    for (auto& v : x) v = g.next_complex_unit();
    return x;
}

}  // namespace

// ---- converters -------------------------------------------------------------

TEST_CASE("six-bit converter hits the classic sine quantization budget") {
    // Clip at sqrt(2) above the RMS puts the clip level exactly at the sine
    // peak, the operating point of the 6.02 dB/bit + 1.76 dB rule.
    const cvec x = full_scale_sine(1u << 16);
    const cvec q = dac_quantize(x, 6.0, 3.0103);
    const double want = 6.02 * 6.0 + 1.76;
    CHECK(sqnr_db(x, q) == Catch::Approx(want).margin(0.5));
}

TEST_CASE("converter produces at most 2^enob distinct levels per rail") {
    const cvec q = dac_quantize(gaussian_signal(1u << 14, 21), 6.0, 13.0);
    std::set<double> re, im;
    for (const auto& v : q) {
        re.insert(v.real());
        im.insert(v.imag());
    }
    CHECK(re.size() <= 64);
    CHECK(im.size() <= 64);
    CHECK(re.size() > 32);  // most codes exercised at 13 dB headroom
}

TEST_CASE("a silent rail passes through the converter untouched") {
    const cvec q = dac_quantize(full_scale_sine(4096), 6.0, 3.0103);
    for (const auto& v : q) CHECK(v.imag() == 0.0);
}

TEST_CASE("converter clipping saturates at the configured headroom") {
    // 0 dB headroom: clip level equals the rail RMS, so big samples pin at
    // the outermost reconstruction level a - step/2.
    cvec x = full_scale_sine(4096);
    const cvec q = dac_quantize(x, 4.0, 0.0);
    double rail = 0.0;
    for (const auto& v : x) rail += v.real() * v.real();
    const double a = std::sqrt(rail / double(x.size()));
    const double top = a - (2.0 * a / 16.0) / 2.0;
    double worst = 0.0;
    for (const auto& v : q) worst = std::max(worst, std::abs(v.real()));
    CHECK(worst == Catch::Approx(top).epsilon(1e-12));
}

TEST_CASE("receive converter shares the transmit converter law") {
    const cvec x = gaussian_signal(4096, 22);
    const cvec a = dac_quantize(x, 6.0, 13.0);
    const cvec b = adc_quantize(x, 6.0, 13.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("sub-one-bit converters are rejected") {
    CHECK_THROWS_AS(dac_quantize(cvec(8, cplx(1.0, 0.0)), 0.5, 13.0), std::domain_error);
}

// ---- amplifier --------------------------------------------------------------

TEST_CASE("amplifier is transparent far below saturation") {
    const cvec x = gaussian_signal(4096, 23);
    const cvec y = rapp_amplify(x, 40.0, 2.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(y[i] - x[i]) / std::abs(x[i]));
    CHECK(worst < 1e-4);
}

TEST_CASE("amplifier compresses the saturation point by 2^(-1/4)") {
    // Constant-modulus input with zero backoff: every sample sits exactly at
    // v_sat, where the smoothness-2 law gives 1/(1+1)^(1/4).
    Xorshift64Star rng(24);
    cvec x(4096);
    for (auto& v : x) v = std::polar(1.0, 2.0 * kPi * rng.next_double());
    const cvec y = rapp_amplify(x, 0.0, 2.0);
    const double want = std::pow(2.0, -0.25);
    for (std::size_t i = 0; i < x.size(); i += 97) {
        CHECK(std::abs(y[i]) == Catch::Approx(want).epsilon(1e-12));
        CHECK(std::arg(y[i]) == Catch::Approx(std::arg(x[i])).margin(1e-12));
    }
}

TEST_CASE("amplifier transfer is monotone and never crosses saturation") {
    cvec ramp(512);
    for (std::size_t i = 0; i < ramp.size(); ++i)
        ramp[i] = cplx(double(i + 1) / 100.0, 0.0);
    const double pin = mean_power(ramp);
    const double v_sat = std::sqrt(pin);  // zero backoff
    const cvec y = rapp_amplify(ramp, 0.0, 2.0);
    for (std::size_t i = 1; i < y.size(); ++i) CHECK(y[i].real() > y[i - 1].real());
    for (const auto& v : y) CHECK(v.real() < v_sat);
}

TEST_CASE("amplifier passes silence through") {
    const cvec z(16, cplx(0.0, 0.0));
    const cvec y = rapp_amplify(z, 9.0, 2.0);
    for (const auto& v : y) CHECK(v == cplx(0.0, 0.0));
}

// ---- modulator --------------------------------------------------------------

TEST_CASE("modulator follows the null-biased sine transfer") {
    const std::vector<double> vi{0.0, 4.0, 4.0 / 3.0, 8.0 / 3.0, -4.0};
    const std::vector<double> vq{0.0, 0.0, 4.0, 0.0, 0.0};
    const cvec carrier(vi.size(), cplx(1.0, 0.0));
    const cvec e = iq_mzm_modulate(vi, vq, 4.0, carrier);
    CHECK(std::abs(e[0]) < 1e-15);
    CHECK(e[1].real() == Catch::Approx(1.0).margin(1e-12));
    CHECK(e[2].real() == Catch::Approx(0.5).margin(1e-12));
    CHECK(e[2].imag() == Catch::Approx(1.0).margin(1e-12));
    CHECK(e[3].real() == Catch::Approx(std::sqrt(3.0) / 2.0).margin(1e-12));
    CHECK(e[4].real() == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("modulator small-signal slope and cubic compression") {
    const double v_pi = 4.0;
    const double k = kPi / (2.0 * v_pi);
    const cvec ones(2, cplx(1.0, 0.0));
    {
        const double v = 1e-3 * v_pi;
        const cvec e = iq_mzm_modulate({v, -v}, {0.0, 0.0}, v_pi, ones);
        CHECK(e[0].real() / (k * v) == Catch::Approx(1.0).margin(1e-5));
        CHECK(e[1].real() / (-k * v) == Catch::Approx(1.0).margin(1e-5));
    }
    {
        const double v = 0.2 * v_pi;
        const cvec e = iq_mzm_modulate({v}, {0.0}, v_pi, cvec(1, cplx(1.0, 0.0)));
        const double x = k * v;
        const double cubic = 1.0 - x * x / 6.0 + x * x * x * x / 120.0;
        CHECK(e[0].real() / x == Catch::Approx(cubic).margin(1e-4));
    }
}

TEST_CASE("modulator multiplies the optical carrier") {
    const std::vector<double> vi{1.0, -2.0, 0.5};
    const std::vector<double> vq{0.3, 1.1, -0.7};
    const cvec ones(3, cplx(1.0, 0.0));
    cvec rot(3);
    for (std::size_t i = 0; i < 3; ++i) rot[i] = std::polar(1.0, 0.4 + 0.3 * double(i));
    const cvec base = iq_mzm_modulate(vi, vq, 4.0, ones);
    const cvec out = iq_mzm_modulate(vi, vq, 4.0, rot);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(out[i] - base[i] * rot[i]) < 1e-15);
}

TEST_CASE("modulator rejects mismatched drive and carrier lengths") {
    const cvec carrier(3, cplx(1.0, 0.0));
    CHECK_THROWS_AS(iq_mzm_modulate({1.0, 2.0}, {1.0, 2.0, 3.0}, 4.0, carrier),
                    std::domain_error);
    CHECK_THROWS_AS(iq_mzm_modulate({1.0, 2.0}, {1.0, 2.0}, 4.0, carrier),
                    std::domain_error);
}

// ---- laser ------------------------------------------------------------------

TEST_CASE("ideal laser is a constant unit field") {
    LinkConfig cfg;
    cfg.toggles.laser_phase_noise = false;
    cfg.toggles.rin = false;
    const cvec f = laser_field(256, cfg, 31);
    for (const auto& v : f) CHECK(v == cplx(1.0, 0.0));
}

TEST_CASE("laser phase walk matches the linewidth") {
    LinkConfig cfg;
    cfg.toggles.rin = false;
    const std::size_t n = 1u << 20;
    const cvec f = laser_field(n, cfg, 32);
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = std::arg(f[i] * std::conj(f[i - 1]));
        acc += d * d;
    }
    const double want = 2.0 * kPi * cfg.laser_linewidth_hz / cfg.sample_rate_hz;
    CHECK(acc / double(n - 1) == Catch::Approx(want).epsilon(0.05));
}

TEST_CASE("laser intensity noise matches the configured spectral density") {
    LinkConfig cfg;
    cfg.toggles.laser_phase_noise = false;
    const std::size_t n = 1u << 20;
    const cvec f = laser_field(n, cfg, 33);
    double mean = 0.0;
    for (const auto& v : f) mean += std::norm(v);
    mean /= double(n);
    double var = 0.0;
    for (const auto& v : f) {
        const double d = std::norm(v) - mean;
        var += d * d;
    }
    var /= double(n);
    const double want =
        std::pow(10.0, cfg.rin_db_hz / 10.0) * cfg.sample_rate_hz / 2.0;
    CHECK(mean == Catch::Approx(1.0).epsilon(0.01));
    CHECK(var == Catch::Approx(want).epsilon(0.05));
}

// ---- coherent receiver -------------------------------------------------------

TEST_CASE("noise-free receiver mixes the signal against the local oscillator") {
    LinkConfig cfg;
    cfg.toggles.shot = false;
    cfg.toggles.thermal = false;
    const cvec sig = gaussian_signal(64, 34);
    cvec lo(64);
    for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = std::polar(0.3, 0.1 * double(i));
    const cvec y = coherent_receive(sig, lo, cfg, 35);
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK(y[i] == cfg.pd_responsivity * sig[i] * std::conj(lo[i]));
    CHECK_THROWS_AS(coherent_receive(sig, cvec(8), cfg, 36), std::domain_error);
}

TEST_CASE("receiver noise floor matches the analytic budget") {
    LinkConfig cfg;
    const std::size_t n = 1u << 20;
    const cvec sig(n, cplx(0.0, 0.0));
    const cvec lo(n, cplx(std::sqrt(dbm_to_watt(cfg.lo_power_dbm)), 0.0));
    const cvec y = coherent_receive(sig, lo, cfg, 37);
    const double measured = mean_power(y);
    const double analytic =
        coherent_noise_variance(0.0, dbm_to_watt(cfg.lo_power_dbm), cfg);
    CHECK(measured == Catch::Approx(analytic).epsilon(0.02));
    // Frozen value for the default operating point (13 dBm LO, 35 GHz
    // bandwidth, 0.8 A/W): shot 8.951e-11 per axis plus thermal 3.5e-12.
    CHECK(analytic == Catch::Approx(1.8602e-10).epsilon(0.001));
}

TEST_CASE("noise budget splits into shot and thermal parts") {
    LinkConfig cfg;
    const double p_lo = dbm_to_watt(cfg.lo_power_dbm);
    const double both = coherent_noise_variance(0.0, p_lo, cfg);
    cfg.toggles.shot = false;
    const double thermal_only = coherent_noise_variance(0.0, p_lo, cfg);
    cfg.toggles.shot = true;
    cfg.toggles.thermal = false;
    const double shot_only = coherent_noise_variance(0.0, p_lo, cfg);
    CHECK(both == Catch::Approx(thermal_only + shot_only).epsilon(1e-12));
    CHECK(shot_only > thermal_only);  // shot-limited at a 13 dBm LO
    cfg.toggles.thermal = true;
    cfg.toggles.shot = false;
    CHECK(thermal_only ==
          Catch::Approx(2.0 * cfg.pd_thermal_psd * cfg.pd_thermal_psd *
                        cfg.sample_rate_hz / 2.0)
              .epsilon(1e-12));
}

// ---- frequency responses and shaping ----------------------------------------

TEST_CASE("fourth-order low-pass response hits its corner") {
    FrequencyResponse r;  // bessel4, 30 GHz
    CHECK(r.magnitude(0.0) == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.magnitude(30e9) == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-3));
    CHECK(r.magnitude(-30e9) == r.magnitude(30e9));
    double prev = r.magnitude(0.0);
    for (int i = 1; i <= 100; ++i) {
        const double m = r.magnitude(0.9e9 * double(i));
        CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("measured response tables interpolate in decibels") {
    const std::string path = "resp_table_test.txt";
    {
        std::ofstream out(path);
        out << "# frequency_hz magnitude_db\n";
        out << "10e9 -6\n";          // rows may arrive unsorted
        out << "0 0 # flat at dc\n"; // inline comments allowed
    }
    const FrequencyResponse r = load_response_table(path);
    CHECK(r.magnitude(0.0) == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.magnitude(5e9) == Catch::Approx(std::pow(10.0, -3.0 / 20.0)).margin(1e-9));
    CHECK(r.magnitude(10e9) == Catch::Approx(std::pow(10.0, -6.0 / 20.0)).margin(1e-9));
    CHECK(r.magnitude(25e9) == Catch::Approx(std::pow(10.0, -6.0 / 20.0)).margin(1e-9));
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_response_table("definitely_missing_file_9152.txt"), ConfigError);
    {
        std::ofstream out(path);
        out << "1e9 -1\n";
    }
    CHECK_THROWS_AS(load_response_table(path), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("bandwidth filter scales single tones by the response magnitude") {
    const std::size_t n = 4096;
    const double fs = 70e9;
    FrequencyResponse r;
    for (const std::size_t bin : {std::size_t(585), n - 585}) {
        cvec w(n);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = std::polar(1.0, 2.0 * kPi * double(bin) * double(i) / double(n));
        const double f = (bin <= n / 2 ? double(bin) : double(bin) - double(n)) * fs / double(n);
        const cvec y = apply_tx_response(w, r, fs);
        const double mag = r.magnitude(f);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(y[i] - w[i] * mag));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("pre-emphasis against a flat response is the identity") {
    FrequencyResponse r;
    r.kind = FrequencyResponse::Kind::flat;
    const cvec w = gaussian_signal(1000, 38);  // odd length exercises padding
    const cvec y = pre_emphasize(w, r, 70e9);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        worst = std::max(worst, std::abs(y[i] - w[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("pre-emphasis inverts the default transmitter roll-off exactly") {
    // Within Nyquist the default response never falls below the inverse-gain
    // clamp, so emphasize-then-filter cancels bin by bin.
    FrequencyResponse r;
    const double fs = 70e9;
    const cvec w = gaussian_signal(4096, 39);
    const cvec y = apply_tx_response(pre_emphasize(w, r, fs), r, fs);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        err += std::norm(y[i] - w[i]);
        ref += std::norm(w[i]);
    }
    CHECK(std::sqrt(err / ref) < 1e-9);
}

TEST_CASE("pre-emphasis gain is clamped over deep notches") {
    CHECK(kPreEmphasisClampDb == 15.0);
    FrequencyResponse r;
    r.kind = FrequencyResponse::Kind::table;
    r.table = {{0.0, 0.0}, {10e9, -40.0}, {20e9, 0.0}};
    const std::size_t n = 4096;
    const double fs = 70e9;
    const std::size_t bin = 585;  // ~10 GHz: the notch floor
    cvec w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = std::polar(1.0, 2.0 * kPi * double(bin) * double(i) / double(n));
    const cvec y = pre_emphasize(w, r, fs);
    const double gain = std::abs(y[100]) / std::abs(w[100]);
    CHECK(gain == Catch::Approx(std::pow(10.0, 15.0 / 20.0)).epsilon(1e-6));
}

// ---- composite link ----------------------------------------------------------

TEST_CASE("an all-off link is a bit-exact wire") {
    LinkConfig cfg;
    cfg.toggles = LinkToggles{false, false, false, false, false, false, false, false, false};
    const cvec w = gaussian_signal(4096, 40);
    const cvec y = run_ob2b(w, cfg, 41);
    REQUIRE(y.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(y[i] == w[i]);
}

TEST_CASE("converters-only link reproduces the sine budget") {
    LinkConfig cfg;
    cfg.toggles = LinkToggles{false, false, false, false, false, false, false, false, true};
    cfg.clip_ratio_db = 3.0103;
    const cvec x = full_scale_sine(1u << 16);
    const cvec y = run_ob2b(x, cfg, 42);
    CHECK(sqnr_db(x, y) == Catch::Approx(6.02 * 6.0 + 1.76).margin(1.0));
}

TEST_CASE("the full link is reproducible from its seed") {
    LinkConfig cfg;
    const cvec w = gaussian_signal(8192, 43);
    const cvec a = run_ob2b(w, cfg, 44);
    const cvec b = run_ob2b(w, cfg, 44);
    const cvec c = run_ob2b(w, cfg, 45);
    REQUIRE(a.size() == b.size());
    bool same_seed_equal = true, diff_seed_equal = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same_seed_equal = same_seed_equal && a[i] == b[i];
        diff_seed_equal = diff_seed_equal && a[i] == c[i];
    }
    CHECK(same_seed_equal);
    CHECK_FALSE(diff_seed_equal);
}

TEST_CASE("the full link preserves the waveform up to gain and rotation") {
    // Detuning and phase walk are handled by the pilot recovery stage, so
    // they are parked here to expose the remaining distortion budget.
    LinkConfig cfg;
    cfg.lo_freq_offset_hz = 0.0;
    cfg.toggles.laser_phase_noise = false;
    const cvec w = gaussian_signal(1u << 15, 46);
    const cvec y = run_ob2b(w, cfg, 47);
    cplx cross(0.0, 0.0);
    double pw = 0.0, py = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        cross += y[i] * std::conj(w[i]);
        pw += std::norm(w[i]);
        py += std::norm(y[i]);
    }
    const double corr = std::abs(cross) / std::sqrt(pw * py);
    CHECK(corr > 0.85);
}
