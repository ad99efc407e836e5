#pragma once

#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/flow_io.hpp"

namespace flowbench::harness {

/// FNV-1a over a canonical parameter string; names the cache directory.
inline std::string fnv1a_hex(const std::string& text) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string pair_stem(int i, int j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d_%04d", i, j);
    return buf;
}

/// On-disk .flo store keyed by (engine, params hash, sequence, frame pair).
/// A hit is bit-identical to a fresh computation because .flo roundtrips
/// float32 exactly.
class FlowCache {
public:
    FlowCache() = default; // disabled cache: always computes
    explicit FlowCache(std::filesystem::path root) : root_(std::move(root)), enabled_(true) {}

    bool enabled() const { return enabled_; }

    std::filesystem::path entry_path(const std::string& engine, const std::string& params_hash,
                                     const std::string& sequence_id, int i, int j) const {
        return root_ / engine / params_hash / sequence_id / (pair_stem(i, j) + ".flo");
    }

    FlowField get_or_compute(const std::string& engine, const std::string& params_hash,
                             const std::string& sequence_id, int i, int j,
                             const std::function<FlowField()>& compute) const {
        if (!enabled_) return compute();
        const std::filesystem::path path = entry_path(engine, params_hash, sequence_id, i, j);
        if (std::filesystem::exists(path)) return read_flo(path);
        FlowField flow = compute();
        std::filesystem::create_directories(path.parent_path());
        write_flo(flow, path);
        return flow;
    }

private:
    std::filesystem::path root_;
    bool enabled_ = false;
};

} // namespace flowbench::harness
