#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "edarof/common.hpp"

namespace edarof {

inline double mean_power(const cvec& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return acc / double(x.size());
}

inline double rms(const cvec& x) { return std::sqrt(mean_power(x)); }

// Per-axis RMS: the 2n real components treated as one population,
// sqrt(sum(re^2 + im^2) / 2n).
inline double rms_axis(const cvec& x) { return std::sqrt(mean_power(x) / 2.0); }

// Documented SNR ceiling: reported when the error power underflows to zero
// (e.g. exact reconstruction), so the metric is always finite.
inline constexpr double kSnrCapDb = 120.0;

// Data-aided EVM against known transmitted symbols:
// sqrt(mean|rx-ref|^2) / sqrt(mean|ref|^2).
inline double evm_rms(const cvec& rx, const cvec& ref) {
    if (rx.empty() || rx.size() != ref.size())
        throw std::domain_error("evm_rms: empty or length-mismatched inputs");
    double err = 0.0;
    double pref = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        err += std::norm(rx[i] - ref[i]);
        pref += std::norm(ref[i]);
    }
    if (pref <= 0.0) throw std::domain_error("evm_rms: zero-power reference");
    return std::sqrt(err / pref);
}

inline double snr_db_from_evm(double evm) {
    if (!(evm > 0.0)) return kSnrCapDb;
    const double snr = -20.0 * std::log10(evm);
    return snr < kSnrCapDb ? snr : kSnrCapDb;
}

struct FitResult {
    double slope = 0.0;      // dB per unit x
    double intercept = 0.0;  // dB
    double r_squared = 0.0;  // 1 - SS_res/SS_tot
};

// Ordinary least squares y = slope*x + intercept.
inline FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::domain_error("linear_fit: need at least 3 (x, y) points");
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw std::domain_error("linear_fit: degenerate x (all points equal)");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = syy - fit.slope * sxy;
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    if (fit.r_squared < 0.0) fit.r_squared = 0.0;
    if (fit.r_squared > 1.0) fit.r_squared = 1.0;
    return fit;
}

}  // namespace edarof
