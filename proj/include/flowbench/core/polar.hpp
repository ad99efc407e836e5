#pragma once

#include <cmath>
#include <vector>

#include "flowbench/core/flow.hpp"

namespace flowbench {

/// Below this magnitude a vector's direction is meaningless; cos/sin emit as 0.
inline constexpr float kPolarMagnitudeEpsilon = 1e-3f;

/// Per-pixel (cos, sin, magnitude) planes of a flow field.
struct PolarPlanes {
    int width = 0;
    int height = 0;
    std::vector<float> cos_plane;
    std::vector<float> sin_plane;
    std::vector<float> magnitude;
};

inline PolarPlanes flow_to_polar(const FlowField& flow) {
    validate_flow(flow, "flow_to_polar");
    PolarPlanes p;
    p.width = flow.width;
    p.height = flow.height;
    p.cos_plane.resize(flow.pixel_count());
    p.sin_plane.resize(flow.pixel_count());
    p.magnitude.resize(flow.pixel_count());
    for (size_t i = 0; i < flow.pixel_count(); ++i) {
        const FlowVec& f = flow.vectors[i];
        const float mag = std::hypot(f.u, f.v);
        p.magnitude[i] = mag;
        if (mag < kPolarMagnitudeEpsilon) {
            p.cos_plane[i] = 0.0f;
            p.sin_plane[i] = 0.0f;
        } else {
            p.cos_plane[i] = f.u / mag;
            p.sin_plane[i] = f.v / mag;
        }
    }
    return p;
}

} // namespace flowbench
