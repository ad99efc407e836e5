#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "flowbench/error.hpp"

namespace flowbench {

/// Per-pixel displacement in pixels. The convention used throughout:
/// warping `prev` by the field reconstructs `next`, i.e.
/// next(x, y) ~= prev(x + u, y + v).
struct FlowVec {
    float u = 0.0f;
    float v = 0.0f;

    float magnitude() const { return std::hypot(u, v); }
};

inline bool operator==(const FlowVec& a, const FlowVec& b) { return a.u == b.u && a.v == b.v; }

/// Row-major grid of displacement vectors.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<FlowVec> vectors;

    FlowField() = default;
    FlowField(int w, int h, FlowVec fill = {})
        : width(w), height(h), vectors(static_cast<size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0)
            throw InvalidInput("FlowField: dimensions must be positive, got " +
                               std::to_string(w) + "x" + std::to_string(h));
    }

    FlowVec& at(int x, int y) { return vectors[static_cast<size_t>(y) * width + x]; }
    const FlowVec& at(int x, int y) const { return vectors[static_cast<size_t>(y) * width + x]; }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_size(const FlowField& other) const {
        return width == other.width && height == other.height;
    }
    bool all_finite() const {
        for (const FlowVec& f : vectors)
            if (!std::isfinite(f.u) || !std::isfinite(f.v)) return false;
        return true;
    }
};

inline void validate_flow(const FlowField& flow, const std::string& who = "FlowField") {
    if (flow.width <= 0 || flow.height <= 0 || flow.vectors.size() != flow.pixel_count())
        throw InvalidInput(who + ": storage does not match dimensions");
    if (!flow.all_finite())
        throw InvalidInput(who + ": non-finite component");
}

} // namespace flowbench
