#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "edarof/chain.hpp"
#include "edarof/config.hpp"
#include "edarof/metrics.hpp"

namespace edarof {

struct SweepRecord {
    double inv_eta = 0.0;
    int order_m = 0;
    std::size_t n_p = 0;
    std::size_t n_r = 0;
    double snr_db = 0.0;
    double evm_pct = 0.0;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    bool ok = false;
    std::string error;
    std::size_t bit_errors = 0;
    std::size_t n_bits = 0;
};

inline constexpr double kFailedSnrSentinel = -999.0;

// One full transmit -> link -> receive measurement for a fixed plan.
inline SweepRecord run_point(const RunConfig& rc, const ModulationPlan& plan,
                             std::uint64_t seed) {
    SweepRecord rec;
    rec.inv_eta = plan.inv_eta;
    rec.order_m = plan.order_m;
    rec.n_p = plan.n_p;
    rec.n_r = plan.n_r;
    rec.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const TxArtifacts tx = tx_chain(plan, rc.ofdm, rc.link, seed);
        const cvec rx_wave = run_ob2b(tx.waveform, rc.link, derive_seed(seed, 202));
        const RxResult rx = rx_chain(rx_wave, tx, plan, rc.ofdm);
        rec.snr_db = rx.snr_db;
        rec.evm_pct = rx.evm * 100.0;
        rec.bit_errors = rx.bit_errors;
        rec.n_bits = rx.bits.size();
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        rec.snr_db = kFailedSnrSentinel;
        rec.evm_pct = -1.0;
    }
    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    return rec;
}

inline SweepRecord run_single(const RunConfig& rc, double inv_eta) {
    return run_point(rc, make_plan(rc, inv_eta), rc.seed);
}

inline SweepRecord run_drof(const RunConfig& rc, int order) {
    return run_point(rc, make_drof_plan(rc, order), rc.seed);
}

inline std::vector<double> sweep_grid(double start, double stop, double step) {
    if (!(step > 0.0)) throw ConfigError("sweep: step must be positive");
    if (stop < start) throw ConfigError("sweep: stop must be >= start");
    std::vector<double> grid;
    const std::size_t n = std::size_t(std::floor((stop - start) / step + 0.5)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        double v = start + double(i) * step;
        if (v > stop + step * 1e-9) break;
        grid.push_back(v);
    }
    return grid;
}

// Sweeps the 1/eta grid, one independent measurement per point. Points are
// distributed over a worker pool; results land in index order so the output
// is identical for any thread count. All points share the master seed
// (common random numbers), so neighbouring points see the same payload and
// noise realization and the recorded curve is not roughened by
// per-point sampling jitter.
inline std::vector<SweepRecord> run_sweep(const RunConfig& rc) {
    const std::vector<double> grid = sweep_grid(rc.start, rc.stop, rc.step);
    std::vector<SweepRecord> out(grid.size());

    unsigned n_threads = rc.threads ? rc.threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    if (n_threads > grid.size()) n_threads = unsigned(grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            SweepRecord rec;
            try {
                const ModulationPlan plan = make_plan(rc, grid[i]);
                rec = run_point(rc, plan, rc.seed);
            } catch (const std::exception& e) {
                rec.inv_eta = grid[i];
                rec.seed = rc.seed;
                rec.ok = false;
                rec.error = e.what();
                rec.snr_db = kFailedSnrSentinel;
                rec.evm_pct = -1.0;
            }
            out[i] = std::move(rec);
        }
    };

    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace detail

// CSV emission. Wall times are reported as 0.000 unless requested, so that
// repeated runs of the same configuration are byte-identical.
inline std::string sweep_to_csv(const std::vector<SweepRecord>& recs, bool timings) {
    std::string s;
    s += "# edarof sweep v1\n";
    s += "inv_eta,order_m,n_p,n_r,snr_db,evm_pct,seed,wall_time_s\n";
    for (const auto& r : recs) {
        if (!r.ok) {
            std::string msg = r.error;
            for (auto& c : msg)
                if (c == '\n' || c == '\r' || c == ',') c = ' ';
            s += "# error inv_eta=" + detail::fmt("%.4f", r.inv_eta) + " " + msg + "\n";
        }
        s += detail::fmt("%.4f", r.inv_eta);
        s += "," + std::to_string(r.order_m);
        s += "," + std::to_string(r.n_p);
        s += "," + std::to_string(r.n_r);
        s += "," + detail::fmt("%.6f", r.snr_db);
        s += "," + detail::fmt("%.6f", r.evm_pct);
        s += "," + std::to_string(r.seed);
        s += "," + detail::fmt("%.3f", timings ? r.wall_time_s : 0.0);
        s += "\n";
    }

    std::vector<double> x, y;
    for (const auto& r : recs)
        if (r.ok) { x.push_back(r.inv_eta); y.push_back(r.snr_db); }
    if (x.size() >= 3) {
        try {
            const FitResult fit = linear_fit(x, y);
            s += "# fit slope=" + detail::fmt("%.6f", fit.slope) +
                 " intercept=" + detail::fmt("%.6f", fit.intercept) +
                 " r2=" + detail::fmt("%.6f", fit.r_squared) + "\n";
        } catch (const std::exception&) {
            s += "# fit error=degenerate-x\n";
        }
    } else {
        s += "# fit error=degenerate-x\n";
    }
    return s;
}

// Two-column "inv_eta snr_db" text, directly consumable by plotting tools.
inline std::string sweep_to_plot(const std::vector<SweepRecord>& recs) {
    std::string s;
    for (const auto& r : recs)
        if (r.ok)
            s += detail::fmt("%.4f", r.inv_eta) + " " + detail::fmt("%.6f", r.snr_db) + "\n";
    return s;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path);
    out << content;
}

}  // namespace edarof
