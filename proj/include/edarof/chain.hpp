#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "edarof/channel.hpp"
#include "edarof/common.hpp"
#include "edarof/eda.hpp"
#include "edarof/metrics.hpp"
#include "edarof/ofdm.hpp"
#include "edarof/pilot.hpp"
#include "edarof/plan.hpp"
#include "edarof/pulse.hpp"
#include "edarof/rxdsp.hpp"

namespace edarof {

inline constexpr std::size_t kGuardSymbols = 512;  // zero pad each side, symbol rate

// Everything the transmitter produced that the receiver and the scoring
// code need: payload ground truth plus the multiplex bookkeeping that rides
// the ideal side channel.
struct TxArtifacts {
    std::vector<std::uint8_t> bits;
    cvec qam_syms;           // payload constellation points
    cvec frame;              // baseband frame handed to the elastic stage
    EdaMultiplex mux;        // layout, per-stage records, per-segment gains
    cvec preamble_syms;      // symbol-rate training waveform
    cvec waveform;           // analog-ready samples after shaping and pilot
};

// Transmit processing: payload bits -> constellation -> multicarrier frame
// -> elastic digital/analog multiplex -> training preamble prepended ->
// root-raised-cosine shaping -> inverse-response pre-emphasis -> pilot tone
// -> transmit-side converter.
inline TxArtifacts tx_chain(const ModulationPlan& plan, const OfdmConfig& ofdm,
                            const LinkConfig& link, std::uint64_t seed) {
    TxArtifacts tx;
    const std::size_t bits_per_sym = detail::ilog2(ofdm.qam_order);
    tx.bits = random_bits(ofdm.n_symbols * std::size_t(bits_per_sym), derive_seed(seed, 101));
    tx.qam_syms = qam_map(tx.bits, ofdm.qam_order);
    tx.frame = ofdm_modulate(tx.qam_syms, ofdm);
    if (tx.frame.size() != plan.frame_len)
        throw ConfigError("tx_chain: plan frame_len " + std::to_string(plan.frame_len) +
                          " does not match waveform frame " + std::to_string(tx.frame.size()));

    SignalFrame frame{tx.frame, FrameRole::original, 0, ofdm.symbol_rate_hz()};
    tx.mux = eda_modulate(frame, plan);
    tx.preamble_syms = preamble_waveform(ofdm);

    cvec symbol_stream;
    symbol_stream.reserve(2 * kGuardSymbols + tx.preamble_syms.size() + tx.mux.samples.size());
    symbol_stream.insert(symbol_stream.end(), kGuardSymbols, cplx(0.0, 0.0));
    symbol_stream.insert(symbol_stream.end(), tx.preamble_syms.begin(), tx.preamble_syms.end());
    symbol_stream.insert(symbol_stream.end(), tx.mux.samples.begin(), tx.mux.samples.end());
    symbol_stream.insert(symbol_stream.end(), kGuardSymbols, cplx(0.0, 0.0));

    cvec w = pulse_shape(symbol_stream, ofdm);
    if (link.toggles.tx_response && link.tx_response.kind != FrequencyResponse::Kind::flat)
        w = pre_emphasize(w, link.tx_response, ofdm.sample_rate_hz());
    w = insert_pilot(std::move(w), ofdm);
    if (link.toggles.dac) w = dac_quantize(std::move(w), link.enob_bits, link.clip_ratio_db);
    tx.waveform = std::move(w);
    return tx;
}

struct RxResult {
    std::vector<std::uint8_t> bits;
    cvec qam_syms;
    double evm = 0.0;      // rms, relative to the transmitted constellation
    double snr_db = 0.0;
    std::size_t bit_errors = 0;
    std::size_t sync_offset = 0;
};

// Stage-labelled failure so sweep rows can say where a point died.
struct ChainStageError : std::runtime_error {
    ChainStageError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_name(stage) {}
    std::string stage_name;
};

// Receive processing: rail orthonormalization -> pilot frequency/phase
// recovery -> matched filter -> frame synchronization -> adaptive equalizer
// -> elastic demultiplex (with re-slicing of digital segments) ->
// multicarrier demodulation -> data-aided error-vector scoring.
inline RxResult rx_chain(const cvec& received, const TxArtifacts& tx,
                         const ModulationPlan& plan, const OfdmConfig& ofdm) {
    RxResult rx;
    cvec w;
    try {
        w = gram_schmidt_orthonormalize(received);
    } catch (const std::exception& e) {
        throw ChainStageError("orthonormalize", e.what());
    }
    try {
        w = pilot_foc_cpr(w, ofdm);
    } catch (const std::exception& e) {
        throw ChainStageError("pilot-recovery", e.what());
    }
    try {
        w = matched_filter_full_rate(w, ofdm);
    } catch (const std::exception& e) {
        throw ChainStageError("matched-filter", e.what());
    }

    // Reference for sync: the training waveform through both shaping
    // filters (raised-cosine cascade) at full rate.
    std::size_t offset;
    try {
        const cvec rrc = taps_to_cvec(rrc_taps(kRrcTaps, ofdm.rolloff, ofdm.sps));
        const cvec rc = fft_convolve(rrc, rrc);  // odd length: 2*kRrcTaps - 1
        const cvec ref = filter_zero_phase(upsample(tx.preamble_syms, ofdm.sps), rc);
        offset = synchronize(w, ref);
        rx.sync_offset = offset;
    } catch (const SyncError&) {
        throw;
    } catch (const std::exception& e) {
        throw ChainStageError("synchronize", e.what());
    }

    cvec eq_out;
    try {
        LmsConfig lms;
        lms.sps = std::size_t(ofdm.sps);
        eq_out = lms_equalize(w, offset, tx.preamble_syms, tx.mux.samples.size(), lms);
    } catch (const EqDivergenceError&) {
        throw;
    } catch (const std::exception& e) {
        throw ChainStageError("equalize", e.what());
    }

    SignalFrame recovered;
    try {
        EdaMultiplex rx_mux = tx.mux;  // layout + gain records from the side channel
        rx_mux.samples = std::move(eq_out);
        recovered = eda_demodulate(rx_mux, plan, true);
    } catch (const std::exception& e) {
        throw ChainStageError("demultiplex", e.what());
    }

    try {
        rx.qam_syms = ofdm_demodulate(recovered.samples, ofdm);
        rx.bits = qam_demap(rx.qam_syms, ofdm.qam_order);
        rx.evm = evm_rms(rx.qam_syms, tx.qam_syms);
        rx.snr_db = snr_db_from_evm(rx.evm);
        rx.bit_errors = 0;
        for (std::size_t i = 0; i < rx.bits.size() && i < tx.bits.size(); ++i)
            if (rx.bits[i] != tx.bits[i]) ++rx.bit_errors;
    } catch (const std::exception& e) {
        throw ChainStageError("score", e.what());
    }
    return rx;
}

}  // namespace edarof
