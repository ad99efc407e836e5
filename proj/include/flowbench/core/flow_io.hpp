#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "flowbench/core/flow.hpp"
#include "flowbench/error.hpp"

namespace flowbench {

// Middlebury .flo layout, little-endian throughout:
//   bytes 0..3   magic "PIEH" (the float 202021.25)
//   bytes 4..7   int32 width
//   bytes 8..11  int32 height
//   then width*height interleaved float32 pairs (u, v), row-major.

namespace detail {

inline void put_u32_le(std::vector<uint8_t>& buf, uint32_t v) {
    buf.push_back(static_cast<uint8_t>(v & 0xff));
    buf.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
    buf.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
    buf.push_back(static_cast<uint8_t>((v >> 24) & 0xff));
}

inline void put_f32_le(std::vector<uint8_t>& buf, float f) {
    put_u32_le(buf, std::bit_cast<uint32_t>(f));
}

inline uint32_t get_u32_le(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

inline float get_f32_le(const uint8_t* p) { return std::bit_cast<float>(get_u32_le(p)); }

} // namespace detail

inline std::vector<uint8_t> encode_flo(const FlowField& flow) {
    validate_flow(flow, "write_flo");
    std::vector<uint8_t> buf;
    buf.reserve(12 + flow.pixel_count() * 8);
    buf.push_back('P');
    buf.push_back('I');
    buf.push_back('E');
    buf.push_back('H');
    detail::put_u32_le(buf, static_cast<uint32_t>(flow.width));
    detail::put_u32_le(buf, static_cast<uint32_t>(flow.height));
    for (const FlowVec& f : flow.vectors) {
        detail::put_f32_le(buf, f.u);
        detail::put_f32_le(buf, f.v);
    }
    return buf;
}

inline FlowField decode_flo(const std::vector<uint8_t>& buf, const std::string& origin) {
    auto fail = [&](size_t offset, const std::string& msg) -> void {
        throw FormatError(origin + ": " + msg + " at byte " + std::to_string(offset));
    };
    if (buf.size() < 4 || std::memcmp(buf.data(), "PIEH", 4) != 0)
        fail(0, "bad .flo magic (expected \"PIEH\")");
    if (buf.size() < 12) fail(buf.size(), "truncated header (need 12 bytes)");
    const uint32_t w = detail::get_u32_le(buf.data() + 4);
    const uint32_t h = detail::get_u32_le(buf.data() + 8);
    if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) {
        fail(4, "implausible dimensions " + std::to_string(w) + "x" + std::to_string(h));
    }
    const size_t need = 12 + static_cast<size_t>(w) * h * 8;
    if (buf.size() < need)
        fail(buf.size(), "truncated payload (have " + std::to_string(buf.size()) +
                             " bytes, need " + std::to_string(need) + ")");

    FlowField flow(static_cast<int>(w), static_cast<int>(h));
    const uint8_t* p = buf.data() + 12;
    for (size_t i = 0; i < flow.pixel_count(); ++i, p += 8) {
        FlowVec& f = flow.vectors[i];
        f.u = detail::get_f32_le(p);
        f.v = detail::get_f32_le(p + 4);
        if (!std::isfinite(f.u)) fail(static_cast<size_t>(p - buf.data()), "non-finite u component");
        if (!std::isfinite(f.v)) fail(static_cast<size_t>(p - buf.data()) + 4, "non-finite v component");
    }
    return flow;
}

inline void write_flo(const FlowField& flow, const std::filesystem::path& path) {
    const std::vector<uint8_t> buf = encode_flo(flow);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("write_flo: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("write_flo: short write to " + path.string());
}

inline FlowField read_flo(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("read_flo: cannot open " + path.string());
    std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_flo(buf, path.string());
}

} // namespace flowbench
