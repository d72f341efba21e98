#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "edarof/common.hpp"

namespace edarof {

enum class QuantMode { cartesian, polar };

// One stage's quantizer: n_a amplitude levels (per axis for cartesian,
// radial for polar), n_phi phase sectors (polar only), full_scale = clip
// amplitude A (per axis for cartesian, radial maximum for polar).
struct QuantizerSpec {
    QuantMode mode = QuantMode::cartesian;
    int n_a = 5;
    int n_phi = 32;
    double full_scale = 1.0;
};

// Clip events are counted so the range factor r_a can be tuned.
struct QuantStats {
    std::size_t clipped = 0;
    std::size_t total = 0;
};

namespace detail {

// Uniform mid-rise cell index over [-A, A): k = floor((v + A)/step), clamped
// to [0, n-1]. Cell-edge values land in the upper cell (ties toward +inf).
inline int midrise_index(double v, int n, double step, double A, bool* clipped) {
    const double u = (v + A) / step;
    int k = int(std::floor(u));
    if (k < 0) {
        k = 0;
        if (clipped) *clipped = true;
    } else if (k >= n) {
        k = n - 1;
        if (clipped) *clipped = true;
    }
    return k;
}

}  // namespace detail

// Reconstruction points c_k = -A + (k + 0.5)*step per axis.
inline cplx quantize_one_cartesian(cplx v, const QuantizerSpec& spec, bool* clipped = nullptr) {
    const double A = spec.full_scale;
    const double step = 2.0 * A / double(spec.n_a);
    const int ki = detail::midrise_index(v.real(), spec.n_a, step, A, clipped);
    const int kq = detail::midrise_index(v.imag(), spec.n_a, step, A, clipped);
    return {-A + (double(ki) + 0.5) * step, -A + (double(kq) + 0.5) * step};
}

// Radial points r_k = (k + 0.5)*A/n_a; phase centers
// phi_m = (m + 0.5)*2pi/n_phi - pi. Phase wraps (never a clip event); the
// +pi edge saturates into the top sector, matching the toward-+pi tie rule.
inline cplx quantize_one_polar(cplx v, const QuantizerSpec& spec, bool* clipped = nullptr) {
    const double A = spec.full_scale;
    const double rstep = A / double(spec.n_a);
    int kr = int(std::floor(std::abs(v) / rstep));
    if (kr >= spec.n_a) {
        kr = spec.n_a - 1;
        if (clipped) *clipped = true;
    }
    const double pstep = 2.0 * kPi / double(spec.n_phi);
    int kp = int(std::floor((std::arg(v) + kPi) / pstep));  // arg in (-pi, pi]
    if (kp >= spec.n_phi) kp = spec.n_phi - 1;
    if (kp < 0) kp = 0;
    return std::polar((double(kr) + 0.5) * rstep, -kPi + (double(kp) + 0.5) * pstep);
}

namespace detail {

inline void check_spec(const QuantizerSpec& spec) {
    if (spec.n_a < 1 || spec.full_scale <= 0.0 ||
        (spec.mode == QuantMode::polar && spec.n_phi < 1))
        throw std::domain_error("quantize: invalid quantizer spec");
}

}  // namespace detail

inline cvec quantize_cartesian(const cvec& x, const QuantizerSpec& spec, QuantStats* stats = nullptr) {
    detail::check_spec(spec);
    cvec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        bool clip = false;
        out[i] = quantize_one_cartesian(x[i], spec, &clip);
        if (stats) {
            ++stats->total;
            if (clip) ++stats->clipped;
        }
    }
    return out;
}

inline cvec quantize_polar(const cvec& x, const QuantizerSpec& spec, QuantStats* stats = nullptr) {
    detail::check_spec(spec);
    cvec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        bool clip = false;
        out[i] = quantize_one_polar(x[i], spec, &clip);
        if (stats) {
            ++stats->total;
            if (clip) ++stats->clipped;
        }
    }
    return out;
}

inline cvec quantize_block(const cvec& x, const QuantizerSpec& spec, QuantStats* stats = nullptr) {
    return spec.mode == QuantMode::cartesian ? quantize_cartesian(x, spec, stats)
                                             : quantize_polar(x, spec, stats);
}

// Elementwise s_p - s_d; by construction s_d + residual == s_p bit-exactly.
inline cvec residual(const cvec& s_p, const cvec& s_d) {
    if (s_p.size() != s_d.size()) throw std::domain_error("residual: length mismatch");
    cvec out(s_p.size());
    for (std::size_t i = 0; i < s_p.size(); ++i) out[i] = s_p[i] - s_d[i];
    return out;
}

// Receiver-side decision: nearest reconstruction point of the same lattice
// the forward quantizer used. This is what makes the digital segments
// immune to link noise smaller than half a lattice step.
inline cvec slice_to_lattice(const cvec& y, const QuantizerSpec& spec) {
    return quantize_block(y, spec, nullptr);
}

}  // namespace edarof
