#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>

#include "edarof/common.hpp"
#include "edarof/metrics.hpp"
#include "edarof/plan.hpp"
#include "edarof/prng.hpp"
#include "edarof/quantizer.hpp"

// The elastic digital-analog modulation kernel: an M-stage cascade of
// interleaving, low-bit quantization and residual renormalization, time-
// multiplexed as [S_D,1 ... S_D,M | S_A | S_R]. Demodulation telescopes the
// cascade back; with noisy=true the digital segments are first re-sliced to
// their lattices, which is where the digital noise immunity comes from.

namespace edarof {

enum class FrameRole { original, transitional, digital, analog_residual, residual_arof, multiplexed };

struct SignalFrame {
    cvec samples;
    FrameRole role = FrameRole::original;
    int stage = 0;             // meaningful for digital/analog frames
    double sample_rate = 0.0;  // metadata only
};

enum class SegmentRole : std::uint8_t { digital = 0, analog_residual = 1, residual_arof = 2 };

struct SegmentRecord {
    SegmentRole role;
    int stage;           // 1-based for digital segments, 0 otherwise
    std::size_t offset;
    std::size_t length;
    double alpha_gain;   // multiplier applied at the transmitter
};

// Realized per-stage side information, assumed ideally transported.
struct StageRecord {
    double full_scale;     // quantizer range used by this stage
    double residual_gain;  // gain that renormalized this stage's residual
};

struct EdaMultiplex {
    cvec samples;
    std::vector<SegmentRecord> layout;
    std::vector<StageRecord> stages;
    ModulationPlan plan;
    QuantStats quant_stats;
};

// ---- interleaving ---------------------------------------------------------

// Fisher-Yates permutation driven by xorshift64* (constants in prng.hpp) so
// permutations are platform-stable. Each stage uses
// derive_seed(plan.interleaver_seed, stage).
inline std::vector<std::size_t> interleave_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    Xorshift64Star rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(p[i - 1], p[rng.next_below(i)]);
    return p;
}

inline cvec interleave(const cvec& x, std::uint64_t seed) {
    const auto p = interleave_permutation(x.size(), seed);
    cvec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[p[i]];
    return y;
}

inline cvec deinterleave(const cvec& y, std::uint64_t seed) {
    const auto p = interleave_permutation(y.size(), seed);
    cvec x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[p[i]] = y[i];
    return x;
}

// ---- partitioning ---------------------------------------------------------

inline std::pair<cvec, cvec> partition(const cvec& x, std::size_t n_head, std::size_t n_tail) {
    if (n_head + n_tail != x.size())
        throw std::domain_error("partition: counts must sum to the input length");
    return {cvec(x.begin(), x.begin() + std::ptrdiff_t(n_head)),
            cvec(x.begin() + std::ptrdiff_t(n_head), x.end())};
}

inline cvec combine(const cvec& head, const cvec& tail) {
    cvec out;
    out.reserve(head.size() + tail.size());
    out.insert(out.end(), head.begin(), head.end());
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

// ---- per-stage kernel -----------------------------------------------------

namespace detail {

inline double max_axis_abs(const cvec& x) {
    double m = 0.0;
    for (const auto& v : x) {
        m = std::max(m, std::abs(v.real()));
        m = std::max(m, std::abs(v.imag()));
    }
    return m;
}

inline double max_abs(const cvec& x) {
    double m = 0.0;
    for (const auto& v : x) m = std::max(m, std::abs(v));
    return m;
}

// Range selection. Normal mode loads the quantizer at r_a times the input
// RMS (overload tails ride the analog residual and are recovered there).
// D-RoF mode has no analog path to absorb tails, so the range is matched to
// the measured frame extreme: stage 1 sees the frame peak, and each later
// stage inherits support half-a-step wide from its predecessor, which keeps
// the per-stage compression at the full n_a^2.
inline double ranged_full_scale(const cvec& x, const QuantizerSpec& q,
                                const ModulationPlan& plan) {
    double a;
    if (plan.drof_mode)
        a = q.mode == QuantMode::cartesian ? max_axis_abs(x) : max_abs(x);
    else
        a = plan.r_a * (q.mode == QuantMode::cartesian ? rms_axis(x) : rms(x));
    return a > 0.0 ? a : 1.0;
}

}  // namespace detail

struct KernelOutput {
    SignalFrame s_r;      // kept-analog part (final stage only)
    SignalFrame s_d;      // quantized lattice points
    SignalFrame s_a;      // renormalized quantization residual
    StageRecord record;   // realized full scale and residual gain
    QuantStats stats;
};

// One cascade stage: interleave, (final stage) partition, quantize with the
// range rule, subtract, renormalize the residual to RMS r_b.
inline KernelOutput modulation_kernel(const SignalFrame& s_in, int stage,
                                      const ModulationPlan& plan) {
    if (stage < 1 || stage > plan.order_m)
        throw std::domain_error("modulation_kernel: stage index out of range");
    if (std::size_t(plan.order_m) > plan.stage_quantizers.size())
        throw std::domain_error("modulation_kernel: plan is missing stage quantizers");

    const bool final_stage = (stage == plan.order_m);
    const cvec interleaved =
        interleave(s_in.samples, derive_seed(plan.interleaver_seed, std::uint64_t(stage)));

    cvec transitional;
    cvec kept;
    if (final_stage && !plan.drof_mode) {
        auto parts = partition(interleaved, plan.last_stage_len(), plan.kept_analog_len());
        transitional = std::move(parts.first);
        kept = std::move(parts.second);
    } else {
        transitional = interleaved;
    }

    KernelOutput out;
    out.s_r = {std::move(kept), FrameRole::residual_arof, stage, s_in.sample_rate};
    out.record = {1.0, 1.0};

    if (transitional.empty()) {
        out.s_d = {{}, FrameRole::digital, stage, s_in.sample_rate};
        out.s_a = {{}, FrameRole::analog_residual, stage, s_in.sample_rate};
        return out;
    }

    QuantizerSpec spec = plan.stage_quantizers[std::size_t(stage - 1)];
    spec.full_scale = detail::ranged_full_scale(transitional, spec, plan);

    cvec s_d = quantize_block(transitional, spec, &out.stats);
    cvec raw = residual(transitional, s_d);
    const double raw_rms = rms(raw);
    const double gain = raw_rms > 0.0 ? plan.r_b / raw_rms : 1.0;
    cvec s_a(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) s_a[i] = raw[i] * gain;

    out.record = {spec.full_scale, gain};
    out.s_d = {std::move(s_d), FrameRole::digital, stage, s_in.sample_rate};
    out.s_a = {std::move(s_a), FrameRole::analog_residual, stage, s_in.sample_rate};
    return out;
}

// ---- full modulation / demodulation ---------------------------------------

namespace detail {

// Scale a segment to its target mean power, recording the applied gain.
inline double power_scale(cvec& seg, double target_power) {
    const double p = mean_power(seg);
    if (!(p > 0.0) || !(target_power > 0.0)) return 1.0;
    const double g = std::sqrt(target_power / p);
    for (auto& v : seg) v *= g;
    return g;
}

}  // namespace detail

inline EdaMultiplex eda_modulate(const SignalFrame& s_o, const ModulationPlan& plan) {
    if (s_o.samples.size() != plan.frame_len)
        throw std::domain_error("eda_modulate: frame length does not match the plan");
    if (plan.order_m < 1 || plan.stage_quantizers.size() != std::size_t(plan.order_m))
        throw std::domain_error("eda_modulate: plan has no valid stage list");

    EdaMultiplex mux;
    mux.plan = plan;

    std::vector<cvec> digital(std::size_t(plan.order_m));
    cvec analog_residual;
    cvec kept;

    SignalFrame cur = s_o;
    for (int stage = 1; stage <= plan.order_m; ++stage) {
        KernelOutput k = modulation_kernel(cur, stage, plan);
        mux.stages.push_back(k.record);
        mux.quant_stats.clipped += k.stats.clipped;
        mux.quant_stats.total += k.stats.total;
        digital[std::size_t(stage - 1)] = std::move(k.s_d.samples);
        if (stage == plan.order_m) {
            if (!plan.drof_mode) {
                analog_residual = std::move(k.s_a.samples);
                kept = std::move(k.s_r.samples);
            }
        } else {
            cur = SignalFrame{std::move(k.s_a.samples), FrameRole::analog_residual,
                              stage, s_o.sample_rate};
        }
    }

    // Power-scale and lay out segments; empty segments occupy no layout slot.
    mux.samples.reserve(plan.mux_len());
    auto append = [&mux](cvec seg, SegmentRole role, int stage, double target) {
        if (seg.empty()) return;
        const double gain = detail::power_scale(seg, target);
        mux.layout.push_back({role, stage, mux.samples.size(), seg.size(), gain});
        mux.samples.insert(mux.samples.end(), seg.begin(), seg.end());
    };
    for (int stage = 1; stage <= plan.order_m; ++stage)
        append(std::move(digital[std::size_t(stage - 1)]), SegmentRole::digital, stage,
               plan.alpha_d);
    append(std::move(analog_residual), SegmentRole::analog_residual, 0, plan.alpha_a);
    append(std::move(kept), SegmentRole::residual_arof, 0, plan.alpha_r);

    if (mux.samples.size() != plan.mux_len())
        throw std::domain_error("eda_modulate: layout does not reproduce the plan length");
    return mux;
}

namespace detail {

inline cvec extract_segment(const EdaMultiplex& mux, const SegmentRecord& seg) {
    if (seg.offset + seg.length > mux.samples.size())
        throw std::domain_error("eda_demodulate: segment exceeds the multiplex");
    cvec out(mux.samples.begin() + std::ptrdiff_t(seg.offset),
             mux.samples.begin() + std::ptrdiff_t(seg.offset + seg.length));
    const double inv = seg.alpha_gain != 0.0 ? 1.0 / seg.alpha_gain : 1.0;
    for (auto& v : out) v *= inv;
    return out;
}

}  // namespace detail

// Inverse cascade. noisy=true re-slices each digital segment to its recorded
// lattice before reconstruction (receiver operation); noisy=false keeps the
// samples as-is for exact-arithmetic round trips.
inline SignalFrame eda_demodulate(const EdaMultiplex& mux, const ModulationPlan& plan,
                                  bool noisy) {
    if (plan.order_m < 1 || plan.stage_quantizers.size() != std::size_t(plan.order_m) ||
        mux.stages.size() != std::size_t(plan.order_m))
        throw std::domain_error("eda_demodulate: layout/plan mismatch");

    std::vector<cvec> digital(std::size_t(plan.order_m));
    cvec analog_residual;
    cvec kept;
    std::size_t covered = 0;
    std::size_t expect_offset = 0;
    for (const auto& seg : mux.layout) {
        if (seg.offset != expect_offset)
            throw std::domain_error("eda_demodulate: segments are not contiguous");
        expect_offset += seg.length;
        covered += seg.length;
        switch (seg.role) {
            case SegmentRole::digital: {
                if (seg.stage < 1 || seg.stage > plan.order_m)
                    throw std::domain_error("eda_demodulate: digital segment with bad stage");
                cvec s = detail::extract_segment(mux, seg);
                if (noisy) {
                    QuantizerSpec spec = plan.stage_quantizers[std::size_t(seg.stage - 1)];
                    spec.full_scale = mux.stages[std::size_t(seg.stage - 1)].full_scale;
                    s = slice_to_lattice(s, spec);
                }
                digital[std::size_t(seg.stage - 1)] = std::move(s);
                break;
            }
            case SegmentRole::analog_residual:
                analog_residual = detail::extract_segment(mux, seg);
                break;
            case SegmentRole::residual_arof:
                kept = detail::extract_segment(mux, seg);
                break;
        }
    }
    if (covered != mux.samples.size())
        throw std::domain_error("eda_demodulate: layout does not cover the multiplex");

    // Telescope from the final stage back to the original frame.
    cvec a = plan.drof_mode ? cvec(plan.frame_len, cplx(0.0, 0.0))
                            : std::move(analog_residual);
    for (int stage = plan.order_m; stage >= 1; --stage) {
        const double gain = mux.stages[std::size_t(stage - 1)].residual_gain;
        const double inv_gain = gain != 0.0 ? 1.0 / gain : 1.0;
        cvec& dig = digital[std::size_t(stage - 1)];
        if (dig.size() != a.size())
            throw std::domain_error("eda_demodulate: stage length mismatch");
        cvec estimate(dig.size());
        for (std::size_t i = 0; i < dig.size(); ++i)
            estimate[i] = dig[i] + a[i] * inv_gain;
        if (stage == plan.order_m && !plan.drof_mode)
            estimate = combine(estimate, kept);
        if (estimate.size() != plan.frame_len)
            throw std::domain_error("eda_demodulate: reconstructed stage has wrong length");
        a = deinterleave(estimate, derive_seed(plan.interleaver_seed, std::uint64_t(stage)));
    }

    return SignalFrame{std::move(a), FrameRole::original, 0, 0.0};
}

}  // namespace edarof
