#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "flowbench/error.hpp"

namespace flowbench {

/// Row-major grid of luminance samples in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0)
            throw InvalidInput("GrayImage: dimensions must be positive, got " +
                               std::to_string(w) + "x" + std::to_string(h));
    }

    float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

    /// Integer access with clamp-to-edge coordinates.
    float at_clamped(int x, int y) const {
        x = x < 0 ? 0 : (x >= width ? width - 1 : x);
        y = y < 0 ? 0 : (y >= height ? height - 1 : y);
        return at(x, y);
    }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_size(const GrayImage& other) const {
        return width == other.width && height == other.height;
    }
};

/// Checks the stored-sample invariants (size match, finite, in [0,1]).
inline void validate_image(const GrayImage& img, const std::string& who = "GrayImage") {
    if (img.width <= 0 || img.height <= 0 || img.data.size() != img.pixel_count())
        throw InvalidInput(who + ": storage does not match dimensions");
    for (float v : img.data)
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
            throw InvalidInput(who + ": sample out of [0,1] or non-finite");
}

/// Rec. 601 luma weights for RGB ingestion.
inline float luminance_rec601(float r, float g, float b) {
    return 0.299f * r + 0.587f * g + 0.114f * b;
}

} // namespace flowbench
