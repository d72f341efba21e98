#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "edarof/channel.hpp"
#include "edarof/common.hpp"
#include "edarof/ofdm.hpp"
#include "edarof/plan.hpp"

namespace edarof {

// Full description of one simulation run: waveform numerology, link
// impairments, elastic-stage profile, and the sweep grid.
struct RunConfig {
    OfdmConfig ofdm;
    LinkConfig link;

    QuantMode plan_mode = QuantMode::cartesian;
    int n_a = 5;
    int n_phi = 32;
    double r_a = 4.6;
    double r_b = 1.0;
    double alpha_d = 1.0;
    double alpha_a = 1.0;
    double alpha_r = 1.0;
    std::uint64_t interleaver_seed = 1;

    double start = 1.0;   // sweep grid over 1/eta
    double stop = 5.0;
    double step = 0.1;
    std::uint64_t seed = 1;
    std::string out_csv;
    std::string plot_out;
    std::string response_file;
    unsigned threads = 0;  // 0 = hardware concurrency
    bool timings = false;
};

// Copies the fields that must agree across sub-configs (sample rate for the
// link model, converter clip ratio) and loads a measured response table if
// one was named. Call after any mutation of the config.
inline void finalize_config(RunConfig& rc) {
    rc.link.sample_rate_hz = rc.ofdm.sample_rate_hz();
    rc.link.clip_ratio_db = rc.ofdm.clip_ratio_db;
    if (!rc.response_file.empty())
        rc.link.tx_response = load_response_table(rc.response_file);
}

inline ModulationPlan make_plan(const RunConfig& rc, double inv_eta) {
    QuantizerSpec profile;
    profile.mode = rc.plan_mode;
    profile.n_a = rc.n_a;
    profile.n_phi = rc.n_phi;
    ModulationPlan p = derive_plan(inv_eta, rc.ofdm.n_symbols, profile, rc.r_a,
                                   rc.interleaver_seed);
    p.r_b = rc.r_b;
    p.alpha_d = rc.alpha_d;
    p.alpha_a = rc.alpha_a;
    p.alpha_r = rc.alpha_r;
    return p;
}

inline ModulationPlan make_drof_plan(const RunConfig& rc, int order) {
    QuantizerSpec profile;
    profile.mode = rc.plan_mode;
    profile.n_a = rc.n_a;
    profile.n_phi = rc.n_phi;
    ModulationPlan p = derive_drof_plan(order, rc.ofdm.n_symbols, profile,
                                        rc.interleaver_seed);
    p.r_a = rc.r_a;
    p.r_b = rc.r_b;
    p.alpha_d = rc.alpha_d;
    p.alpha_a = rc.alpha_a;
    p.alpha_r = rc.alpha_r;
    return p;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return std::uint64_t(u);
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + v);
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    std::string s = v;
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
    if (s == "off" || s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + v);
}

}  // namespace detail

// Named impairment switches, addressable from config files and the
// command line.
inline bool set_toggle(LinkToggles& t, const std::string& name, bool value) {
    if (name == "tx_response") t.tx_response = value;
    else if (name == "rapp") t.rapp = value;
    else if (name == "mzm") t.mzm = value;
    else if (name == "laser_phase_noise") t.laser_phase_noise = value;
    else if (name == "rin") t.rin = value;
    else if (name == "shot") t.shot = value;
    else if (name == "thermal") t.thermal = value;
    else if (name == "dac") t.dac = value;
    else if (name == "adc") t.adc = value;
    else return false;
    return true;
}

inline void set_all_toggles(LinkToggles& t, bool value) {
    t = LinkToggles{};
    for (const char* n : {"tx_response", "rapp", "mzm", "laser_phase_noise", "rin",
                          "shot", "thermal", "dac", "adc"})
        set_toggle(t, n, value);
}

// "name=on" / "name=off" as accepted by the --toggle flag.
inline void apply_toggle_expr(RunConfig& rc, const std::string& expr) {
    const auto eq = expr.find('=');
    if (eq == std::string::npos)
        throw ConfigError("toggle: expected name=on|off, got '" + expr + "'");
    const std::string name = detail::trim(expr.substr(0, eq));
    const bool value = detail::parse_bool(name, detail::trim(expr.substr(eq + 1)));
    if (name == "all") { set_all_toggles(rc.link.toggles, value); return; }
    if (!set_toggle(rc.link.toggles, name, value))
        throw ConfigError("toggle: unknown impairment '" + name + "'");
}

// Measurement presets: "desk" runs a short frame sized for laptop-scale
// sweeps, "paper" the full-length frame.
inline void apply_preset(RunConfig& rc, const std::string& name) {
    if (name == "desk") {
        rc.ofdm.n_symbols = std::size_t(1) << 14;
    } else if (name == "paper") {
        rc.ofdm.n_symbols = std::size_t(1) << 16;
    } else {
        throw ConfigError("preset: unknown preset '" + name + "' (desk|paper)");
    }
}

// Sectioned key = value configuration text. Unknown sections or keys are
// rejected so that typos cannot silently change an experiment.
inline RunConfig parse_config_text(const std::string& text) {
    RunConfig rc;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "sweep" && section != "ofdm" && section != "link" &&
                section != "plan" && section != "toggles")
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": empty key or value");

        auto bad_key = [&]() {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "' in section [" + section + "]");
        };

        if (section == "sweep") {
            if (key == "start") rc.start = detail::parse_double(key, val);
            else if (key == "stop") rc.stop = detail::parse_double(key, val);
            else if (key == "step") rc.step = detail::parse_double(key, val);
            else if (key == "seed") rc.seed = detail::parse_u64(key, val);
            else if (key == "out") rc.out_csv = val;
            else if (key == "plot") rc.plot_out = val;
            else if (key == "threads") rc.threads = unsigned(detail::parse_u64(key, val));
            else if (key == "timings") rc.timings = detail::parse_bool(key, val);
            else if (key == "preset") apply_preset(rc, val);
            else bad_key();
        } else if (section == "ofdm") {
            if (key == "fft_size") rc.ofdm.fft_size = std::size_t(detail::parse_u64(key, val));
            else if (key == "qam_order") rc.ofdm.qam_order = int(detail::parse_u64(key, val));
            else if (key == "n_symbols") rc.ofdm.n_symbols = std::size_t(detail::parse_u64(key, val));
            else if (key == "preamble_len") rc.ofdm.preamble_len = std::size_t(detail::parse_u64(key, val));
            else if (key == "rolloff") rc.ofdm.rolloff = detail::parse_double(key, val);
            else if (key == "sps") rc.ofdm.sps = int(detail::parse_u64(key, val));
            else if (key == "signal_bandwidth_hz") rc.ofdm.signal_bandwidth_hz = detail::parse_double(key, val);
            else if (key == "pilot_offset_hz") rc.ofdm.pilot_offset_hz = detail::parse_double(key, val);
            else if (key == "pilot_power_ratio_db") rc.ofdm.pilot_power_ratio_db = detail::parse_double(key, val);
            else if (key == "pilot_filter_bw_hz") rc.ofdm.pilot_filter_bw_hz = detail::parse_double(key, val);
            else if (key == "clip_ratio_db") rc.ofdm.clip_ratio_db = detail::parse_double(key, val);
            else bad_key();
        } else if (section == "link") {
            if (key == "enob_bits") rc.link.enob_bits = detail::parse_double(key, val);
            else if (key == "rapp_backoff_db") rc.link.rapp_backoff_db = detail::parse_double(key, val);
            else if (key == "rapp_smoothness") rc.link.rapp_smoothness = detail::parse_double(key, val);
            else if (key == "v_pi") rc.link.v_pi = detail::parse_double(key, val);
            else if (key == "drive_rms_v") rc.link.drive_rms_v = detail::parse_double(key, val);
            else if (key == "pd_responsivity") rc.link.pd_responsivity = detail::parse_double(key, val);
            else if (key == "pd_dark_current") rc.link.pd_dark_current = detail::parse_double(key, val);
            else if (key == "pd_thermal_psd") rc.link.pd_thermal_psd = detail::parse_double(key, val);
            else if (key == "laser_wavelength_m") rc.link.laser_wavelength_m = detail::parse_double(key, val);
            else if (key == "laser_linewidth_hz") rc.link.laser_linewidth_hz = detail::parse_double(key, val);
            else if (key == "rin_db_hz") rc.link.rin_db_hz = detail::parse_double(key, val);
            else if (key == "rop_dbm") rc.link.rop_dbm = detail::parse_double(key, val);
            else if (key == "lo_power_dbm") rc.link.lo_power_dbm = detail::parse_double(key, val);
            else if (key == "lo_freq_offset_hz") rc.link.lo_freq_offset_hz = detail::parse_double(key, val);
            else if (key == "tx_f3db_hz") rc.link.tx_response.f3db_hz = detail::parse_double(key, val);
            else if (key == "tx_response_file") rc.response_file = val;
            else bad_key();
        } else if (section == "plan") {
            if (key == "mode") {
                if (val == "cartesian") rc.plan_mode = QuantMode::cartesian;
                else if (val == "polar") rc.plan_mode = QuantMode::polar;
                else throw ConfigError("config line " + std::to_string(line_no) +
                                       ": mode must be cartesian or polar");
            }
            else if (key == "n_a") rc.n_a = int(detail::parse_u64(key, val));
            else if (key == "n_phi") rc.n_phi = int(detail::parse_u64(key, val));
            else if (key == "r_a") rc.r_a = detail::parse_double(key, val);
            else if (key == "r_b") rc.r_b = detail::parse_double(key, val);
            else if (key == "alpha_d") rc.alpha_d = detail::parse_double(key, val);
            else if (key == "alpha_a") rc.alpha_a = detail::parse_double(key, val);
            else if (key == "alpha_r") rc.alpha_r = detail::parse_double(key, val);
            else if (key == "interleaver_seed") rc.interleaver_seed = detail::parse_u64(key, val);
            else bad_key();
        } else if (section == "toggles") {
            if (key == "all") set_all_toggles(rc.link.toggles, detail::parse_bool(key, val));
            else if (!set_toggle(rc.link.toggles, key, detail::parse_bool(key, val)))
                bad_key();
        } else {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key outside of any section");
        }
    }
    finalize_config(rc);
    return rc;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace edarof
