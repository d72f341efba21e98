// Command-line front end: spectral-efficiency sweeps, single-point runs,
// all-digital reference runs, and frame-container inspection.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edarof/edarof.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> preset;
    std::vector<std::string> toggles;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Configuration file (sectioned key = value)");
    cmd->add_option("--seed", args.seed, "Master seed");
    cmd->add_option("--preset", args.preset, "Measurement preset: desk or paper");
    cmd->add_option("--toggle", args.toggles,
                    "Impairment switch, name=on|off (repeatable; name 'all' addresses every switch)");
}

edarof::RunConfig build_config(const CommonArgs& args) {
    edarof::RunConfig rc;
    if (!args.config_path.empty()) rc = edarof::load_config(args.config_path);
    if (args.preset) edarof::apply_preset(rc, *args.preset);
    if (args.seed) rc.seed = *args.seed;
    for (const auto& expr : args.toggles) edarof::apply_toggle_expr(rc, expr);
    edarof::finalize_config(rc);
    return rc;
}

void print_record(const edarof::SweepRecord& rec) {
    if (!rec.ok) {
        std::printf("# error inv_eta=%.4f %s\n", rec.inv_eta, rec.error.c_str());
    }
    std::printf("inv_eta=%.4f order_m=%d n_p=%zu n_r=%zu snr_db=%.6f evm_pct=%.6f "
                "seed=%llu bits=%zu bit_errors=%zu\n",
                rec.inv_eta, rec.order_m, rec.n_p, rec.n_r, rec.snr_db, rec.evm_pct,
                static_cast<unsigned long long>(rec.seed), rec.n_bits, rec.bit_errors);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elastic digital/analog radio-over-fiber link simulator"};
    app.require_subcommand(1);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep recovered SNR over a 1/eta grid");
    CommonArgs sweep_args;
    add_common(sweep_cmd, sweep_args);
    std::optional<double> opt_start, opt_stop, opt_step;
    std::optional<std::string> opt_out, opt_plot;
    std::optional<unsigned> opt_threads;
    bool flag_timings = false;
    sweep_cmd->add_option("--start", opt_start, "Grid start (1/eta)");
    sweep_cmd->add_option("--stop", opt_stop, "Grid stop (1/eta)");
    sweep_cmd->add_option("--step", opt_step, "Grid step");
    sweep_cmd->add_option("--out", opt_out, "CSV output path (default stdout)");
    sweep_cmd->add_option("--plot", opt_plot, "Two-column inv_eta/snr_db output path");
    sweep_cmd->add_option("--threads", opt_threads, "Worker threads (0 = hardware)");
    sweep_cmd->add_flag("--timings", flag_timings, "Report real wall times in the CSV");

    // single
    auto* single_cmd = app.add_subcommand("single", "Run one point at a given 1/eta");
    CommonArgs single_args;
    add_common(single_cmd, single_args);
    double arg_inv_eta = 1.0;
    std::string dump_frame_path;
    single_cmd->add_option("--inv-eta", arg_inv_eta, "Inverse spectral efficiency 1/eta")
        ->required();
    single_cmd->add_option("--dump-frame", dump_frame_path,
                           "Write the transmitted multiplex container to this path");

    // drof (all-digital reference)
    auto* drof_cmd = app.add_subcommand(
        "drof", "All-digital reference run (every stage quantizes the full frame)");
    CommonArgs drof_args;
    add_common(drof_cmd, drof_args);
    int arg_order = 1;
    drof_cmd->add_option("--order", arg_order, "Number of cascaded quantization stages")
        ->required();

    // frame-info
    auto* info_cmd = app.add_subcommand("frame-info", "Describe a stored multiplex container");
    std::string info_path;
    info_cmd->add_option("path", info_path, "Container file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sweep_cmd->parsed()) {
            edarof::RunConfig rc = build_config(sweep_args);
            if (opt_start) rc.start = *opt_start;
            if (opt_stop) rc.stop = *opt_stop;
            if (opt_step) rc.step = *opt_step;
            if (opt_out) rc.out_csv = *opt_out;
            if (opt_plot) rc.plot_out = *opt_plot;
            if (opt_threads) rc.threads = *opt_threads;
            if (flag_timings) rc.timings = true;

            const auto recs = edarof::run_sweep(rc);
            const std::string csv = edarof::sweep_to_csv(recs, rc.timings);
            if (rc.out_csv.empty())
                std::fputs(csv.c_str(), stdout);
            else
                edarof::write_text_file(rc.out_csv, csv);
            if (!rc.plot_out.empty())
                edarof::write_text_file(rc.plot_out, edarof::sweep_to_plot(recs));

            for (const auto& r : recs)
                if (!r.ok) return kExitSimulation;
            return kExitOk;
        }

        if (single_cmd->parsed()) {
            edarof::RunConfig rc = build_config(single_args);
            if (!dump_frame_path.empty()) {
                const edarof::ModulationPlan plan = edarof::make_plan(rc, arg_inv_eta);
                const edarof::TxArtifacts tx =
                    edarof::tx_chain(plan, rc.ofdm, rc.link, rc.seed);
                edarof::save_frame(dump_frame_path, tx.mux);
            }
            const edarof::SweepRecord rec = edarof::run_single(rc, arg_inv_eta);
            print_record(rec);
            return rec.ok ? kExitOk : kExitSimulation;
        }

        if (drof_cmd->parsed()) {
            edarof::RunConfig rc = build_config(drof_args);
            // The all-digital reference isolates quantization: unless a
            // config file or explicit switches say otherwise, only the
            // converters stay on.
            if (drof_args.toggles.empty() && drof_args.config_path.empty()) {
                edarof::set_all_toggles(rc.link.toggles, false);
                edarof::set_toggle(rc.link.toggles, "dac", true);
                edarof::set_toggle(rc.link.toggles, "adc", true);
            }
            const edarof::SweepRecord rec = edarof::run_drof(rc, arg_order);
            print_record(rec);
            return rec.ok ? kExitOk : kExitSimulation;
        }

        if (info_cmd->parsed()) {
            const edarof::EdaMultiplex mux = edarof::load_frame(info_path);
            std::printf("samples=%zu inv_eta=%.6f order_m=%d frame_len=%zu n_p=%zu n_r=%zu "
                        "drof=%d stages=%zu segments=%zu clipped=%zu/%zu\n",
                        mux.samples.size(), mux.plan.inv_eta, mux.plan.order_m,
                        mux.plan.frame_len, mux.plan.n_p, mux.plan.n_r,
                        int(mux.plan.drof_mode), mux.stages.size(), mux.layout.size(),
                        mux.quant_stats.clipped, mux.quant_stats.total);
            for (const auto& seg : mux.layout) {
                const char* role = seg.role == edarof::SegmentRole::digital
                                       ? "digital"
                                       : (seg.role == edarof::SegmentRole::analog_residual
                                              ? "analog-residual"
                                              : "kept-analog");
                std::printf("  segment role=%s stage=%d offset=%zu length=%zu gain=%.6g\n",
                            role, seg.stage, seg.offset, seg.length, seg.alpha_gain);
            }
            return kExitOk;
        }
    } catch (const edarof::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSimulation;
    }
    return kExitOk;
}
