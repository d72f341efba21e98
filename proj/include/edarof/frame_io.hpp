#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "edarof/common.hpp"
#include "edarof/eda.hpp"
#include "edarof/plan.hpp"

namespace edarof {

// Binary container for a multiplexed frame plus everything needed to
// demodulate it later: the plan, the per-stage quantizer records, and the
// segment layout. Little-endian, fixed-width fields.
inline constexpr char kFrameMagic[4] = {'E', 'D', 'A', 'F'};
inline constexpr std::uint32_t kFrameVersion = 1;

namespace detail {

inline void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(char((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& s, double v) {
    put_u64(s, std::bit_cast<std::uint64_t>(v));
}

struct ByteReader {
    const std::string& s;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > s.size()) throw ConfigError("frame file: truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(s[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(s[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string bytes(std::size_t n) {
        need(n);
        std::string out = s.substr(pos, n);
        pos += n;
        return out;
    }
};

}  // namespace detail

inline std::string frame_to_bytes(const EdaMultiplex& mux) {
    std::string s;
    s.append(kFrameMagic, 4);
    detail::put_u32(s, kFrameVersion);

    const std::string plan_kv = plan_to_kv(mux.plan);
    detail::put_u64(s, plan_kv.size());
    s += plan_kv;

    detail::put_u32(s, std::uint32_t(mux.stages.size()));
    for (const auto& st : mux.stages) {
        detail::put_f64(s, st.full_scale);
        detail::put_f64(s, st.residual_gain);
    }

    detail::put_u32(s, std::uint32_t(mux.layout.size()));
    for (const auto& seg : mux.layout) {
        s.push_back(char(std::uint8_t(seg.role)));
        detail::put_u32(s, std::uint32_t(seg.stage));
        detail::put_u64(s, seg.offset);
        detail::put_u64(s, seg.length);
        detail::put_f64(s, seg.alpha_gain);
    }

    detail::put_u64(s, mux.quant_stats.clipped);
    detail::put_u64(s, mux.quant_stats.total);

    detail::put_u64(s, mux.samples.size());
    for (const auto& v : mux.samples) {
        detail::put_f64(s, v.real());
        detail::put_f64(s, v.imag());
    }
    return s;
}

inline EdaMultiplex frame_from_bytes(const std::string& s) {
    detail::ByteReader r{s};
    const std::string magic = r.bytes(4);
    if (std::memcmp(magic.data(), kFrameMagic, 4) != 0)
        throw ConfigError("frame file: bad magic");
    const std::uint32_t ver = r.u32();
    if (ver != kFrameVersion)
        throw ConfigError("frame file: unsupported version " + std::to_string(ver));

    EdaMultiplex mux;
    const std::uint64_t kv_len = r.u64();
    mux.plan = plan_from_kv(r.bytes(std::size_t(kv_len)));

    const std::uint32_t n_stages = r.u32();
    mux.stages.resize(n_stages);
    for (auto& st : mux.stages) {
        st.full_scale = r.f64();
        st.residual_gain = r.f64();
    }

    const std::uint32_t n_segs = r.u32();
    mux.layout.resize(n_segs);
    for (auto& seg : mux.layout) {
        seg.role = SegmentRole(std::uint8_t(r.bytes(1)[0]));
        seg.stage = int(r.u32());
        seg.offset = std::size_t(r.u64());
        seg.length = std::size_t(r.u64());
        seg.alpha_gain = r.f64();
    }

    mux.quant_stats.clipped = std::size_t(r.u64());
    mux.quant_stats.total = std::size_t(r.u64());

    const std::uint64_t n_samples = r.u64();
    r.need(std::size_t(n_samples) * 16);
    mux.samples.resize(std::size_t(n_samples));
    for (auto& v : mux.samples) {
        const double re = r.f64();
        const double im = r.f64();
        v = cplx(re, im);
    }
    return mux;
}

inline void save_frame(const std::string& path, const EdaMultiplex& mux) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("frame file: cannot open " + path + " for writing");
    const std::string bytes = frame_to_bytes(mux);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw ConfigError("frame file: write failed for " + path);
}

inline EdaMultiplex load_frame(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("frame file: cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return frame_from_bytes(bytes);
}

}  // namespace edarof
