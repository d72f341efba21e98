#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "edarof/common.hpp"
#include "edarof/quantizer.hpp"

namespace edarof {

// Every system parameter derived from the target spectral efficiency.
// eta is the efficiency relative to plain analog transport; the code carries
// inv_eta = 1/eta >= 1 throughout because the sweep is parameterized that way.
//
// Cascade topology: stages 1..M-1 each quantize their full length-N input and
// hand the renormalized residual to the next stage; only the final stage
// splits its input into a transitional part (quantized) and a kept-analog
// part (transmitted as S_R). n_p is the per-stage digital sample budget and
// n_r the analog budget: the final stage quantizes
// last_stage_len = M*n_p - (M-1)*N samples and keeps kept_analog_len = M*n_r,
// which makes the multiplex length exactly n_r + (M+1)*n_p while the digital
// fraction grows continuously in inv_eta (no jump when M steps).
struct ModulationPlan {
    double inv_eta = 1.0;
    int order_m = 1;            // M, number of cascaded quantization stages
    std::size_t frame_len = 0;  // N, input samples per frame
    std::size_t n_p = 0;        // per-stage digital sample budget
    std::size_t n_r = 0;        // per-stage analog sample budget
    // Quantizer full-scale = r_a * per-axis RMS of the stage input. The
    // default keeps overload events rare enough (Gaussian tail beyond
    // 4.6 sigma) that no residual-segment outliers survive into the analog
    // waveform, while the per-stage compression stays shallow enough for the
    // recovered-SNR-vs-1/eta curve to remain quasi-linear.
    double r_a = 4.6;
    double r_b = 1.0;           // residual renormalization target RMS
    std::vector<QuantizerSpec> stage_quantizers;  // templates; full_scale realized per frame
    double alpha_d = 1.0;       // target mean power of each digital segment
    double alpha_a = 1.0;       // target mean power of the analog-residual segment
    double alpha_r = 1.0;       // target mean power of the kept-analog segment
    std::uint64_t interleaver_seed = 1;
    bool drof_mode = false;     // true: S_A and S_R dropped from the multiplex

    // Samples quantized by the final stage (= frame_len when drof_mode).
    std::size_t last_stage_len() const {
        if (drof_mode) return frame_len;
        const std::size_t full = std::size_t(order_m - 1) * frame_len;
        const std::size_t digital = std::size_t(order_m) * n_p;
        return digital > full ? digital - full : 0;
    }

    // Samples bypassing every quantizer (the S_R segment).
    std::size_t kept_analog_len() const {
        return drof_mode ? 0 : std::size_t(order_m) * n_r;
    }

    std::size_t mux_len() const {
        if (drof_mode) return std::size_t(order_m) * frame_len;
        return n_r + std::size_t(order_m + 1) * n_p;
    }
};

// M = max(1, ceil(inv_eta - 1)); integer inv_eta resolves to the smaller M.
inline int order_for(double inv_eta) {
    const int m = int(std::ceil(inv_eta - 1.0 - 1e-9));
    return m < 1 ? 1 : m;
}

inline ModulationPlan derive_plan(double inv_eta, std::size_t frame_len,
                                  const QuantizerSpec& profile = QuantizerSpec{},
                                  double r_a = 4.6, std::uint64_t interleaver_seed = 1) {
    if (!(inv_eta >= 1.0)) throw std::domain_error("derive_plan: inv_eta must be >= 1");
    if (frame_len == 0) throw std::domain_error("derive_plan: frame_len must be positive");

    ModulationPlan p;
    p.inv_eta = inv_eta;
    p.frame_len = frame_len;
    p.order_m = order_for(inv_eta);
    p.r_a = r_a;
    p.interleaver_seed = interleaver_seed;

    const double m = double(p.order_m);
    const double n = double(frame_len);
    // Partition fraction f = (1/eta - 1)/M from the length accounting
    // L = n_r + (M+1)*n_p; round half up.
    std::size_t np = std::size_t(std::floor(n * (inv_eta - 1.0) / m + 0.5));
    if (p.order_m > 1) {
        // Rounding may otherwise starve the final stage at the low band edge.
        const std::size_t np_min =
            (frame_len * std::size_t(p.order_m - 1) + std::size_t(p.order_m) - 1) /
            std::size_t(p.order_m);
        if (np < np_min) np = np_min;
    }
    if (np > frame_len) np = frame_len;
    p.n_p = np;
    p.n_r = frame_len - np;
    p.stage_quantizers.assign(std::size_t(p.order_m), profile);
    return p;
}

// D-RoF mode: m full-frame stages, final residual dropped instead of sent.
inline ModulationPlan derive_drof_plan(int m, std::size_t frame_len,
                                       const QuantizerSpec& profile = QuantizerSpec{},
                                       std::uint64_t interleaver_seed = 1) {
    if (m < 1) throw std::domain_error("derive_drof_plan: order must be >= 1");
    if (frame_len == 0) throw std::domain_error("derive_drof_plan: frame_len must be positive");
    ModulationPlan p;
    p.inv_eta = double(m);
    p.order_m = m;
    p.frame_len = frame_len;
    p.n_p = frame_len;
    p.n_r = 0;
    p.drof_mode = true;
    p.interleaver_seed = interleaver_seed;
    p.stage_quantizers.assign(std::size_t(m), profile);
    return p;
}

struct PlanViolation {
    std::string code;    // machine-readable, e.g. "partition-sum"
    std::string detail;  // human-readable context
};

// Diagnostics only: reports every violated invariant, never throws.
inline std::vector<PlanViolation> validate_plan(const ModulationPlan& p) {
    std::vector<PlanViolation> v;
    auto add = [&v](const char* code, const std::string& detail) {
        v.push_back({code, detail});
    };

    if (!(p.inv_eta >= 1.0)) add("eta-range", "inv_eta must be >= 1");
    if (p.frame_len == 0) add("frame-len", "frame_len must be positive");
    if (p.order_m < 1) add("order-bound", "order_m must be >= 1");
    if (p.n_p + p.n_r != p.frame_len)
        add("partition-sum", "n_p + n_r must equal frame_len");
    if (!(p.r_a > 0.0) || !(p.r_b > 0.0))
        add("factor-positive", "r_a and r_b must be positive");
    if (!(p.alpha_d > 0.0) || !(p.alpha_a > 0.0) || !(p.alpha_r > 0.0))
        add("alpha-positive", "alpha factors must be positive");
    if (p.stage_quantizers.size() != std::size_t(p.order_m > 0 ? p.order_m : 0))
        add("stage-count", "stage_quantizers must hold one spec per stage");
    for (const auto& q : p.stage_quantizers) {
        if (q.n_a < 1 || q.full_scale <= 0.0 ||
            (q.mode == QuantMode::polar && q.n_phi < 1)) {
            add("quantizer-invalid", "stage quantizer has invalid levels or full scale");
            break;
        }
    }

    if (p.drof_mode) {
        if (p.n_r != 0 || p.n_p != p.frame_len)
            add("drof-residual", "drof_mode requires n_r = 0 and n_p = frame_len");
    } else if (p.order_m >= 1) {
        // Order band 1/(M+1) <= eta <= 1/M, i.e. M <= inv_eta <= M+1.
        if (p.inv_eta < double(p.order_m) - 1e-9 ||
            p.inv_eta > double(p.order_m + 1) + 1e-9)
            add("order-bound", "order_m outside the band for this inv_eta");
        // n_p = 0 iff pure analog. Compared against the derivation formula so
        // that targets whose rounding legitimately collapses to analog pass.
        if (p.frame_len > 0) {
            const std::size_t expect = std::size_t(std::floor(
                double(p.frame_len) * (p.inv_eta - 1.0) / double(p.order_m) + 0.5));
            if ((p.n_p == 0) != (expect == 0))
                add("arof-partition", "n_p = 0 must coincide with inv_eta = 1");
        }
    }
    return v;
}

// --- key-value serialization (the harness config block format) ------------

inline const char* quant_mode_name(QuantMode m) {
    return m == QuantMode::cartesian ? "cartesian" : "polar";
}

inline std::string plan_to_kv(const ModulationPlan& p) {
    std::ostringstream os;
    os.precision(17);
    os << "inv_eta = " << p.inv_eta << "\n"
       << "order_m = " << p.order_m << "\n"
       << "frame_len = " << p.frame_len << "\n"
       << "n_p = " << p.n_p << "\n"
       << "n_r = " << p.n_r << "\n"
       << "r_a = " << p.r_a << "\n"
       << "r_b = " << p.r_b << "\n"
       << "alpha_d = " << p.alpha_d << "\n"
       << "alpha_a = " << p.alpha_a << "\n"
       << "alpha_r = " << p.alpha_r << "\n"
       << "interleaver_seed = " << p.interleaver_seed << "\n"
       << "drof_mode = " << (p.drof_mode ? 1 : 0) << "\n";
    for (std::size_t i = 0; i < p.stage_quantizers.size(); ++i) {
        const auto& q = p.stage_quantizers[i];
        os << "stage_" << (i + 1) << " = " << quant_mode_name(q.mode) << " " << q.n_a
           << " " << q.n_phi << " " << q.full_scale << "\n";
    }
    return os.str();
}

inline ModulationPlan plan_from_kv(const std::string& text) {
    ModulationPlan p;
    p.stage_quantizers.clear();
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        try {
            if (key == "inv_eta") p.inv_eta = std::stod(val);
            else if (key == "order_m") p.order_m = std::stoi(val);
            else if (key == "frame_len") p.frame_len = std::stoull(val);
            else if (key == "n_p") p.n_p = std::stoull(val);
            else if (key == "n_r") p.n_r = std::stoull(val);
            else if (key == "r_a") p.r_a = std::stod(val);
            else if (key == "r_b") p.r_b = std::stod(val);
            else if (key == "alpha_d") p.alpha_d = std::stod(val);
            else if (key == "alpha_a") p.alpha_a = std::stod(val);
            else if (key == "alpha_r") p.alpha_r = std::stod(val);
            else if (key == "interleaver_seed") p.interleaver_seed = std::stoull(val);
            else if (key == "drof_mode") p.drof_mode = std::stoi(val) != 0;
            else if (key.rfind("stage_", 0) == 0) {
                std::istringstream qs(val);
                std::string mode;
                QuantizerSpec q;
                if (!(qs >> mode >> q.n_a >> q.n_phi >> q.full_scale))
                    throw ConfigError("plan_from_kv: malformed quantizer line: " + line);
                if (mode == "cartesian") q.mode = QuantMode::cartesian;
                else if (mode == "polar") q.mode = QuantMode::polar;
                else throw ConfigError("plan_from_kv: unknown quantizer mode: " + mode);
                p.stage_quantizers.push_back(q);
            } else {
                throw ConfigError("plan_from_kv: unknown key: " + key);
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("plan_from_kv: bad value for key: " + key);
        } catch (const std::out_of_range&) {
            throw ConfigError("plan_from_kv: value out of range for key: " + key);
        }
    }
    return p;
}

}  // namespace edarof
