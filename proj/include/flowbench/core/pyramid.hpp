#pragma once

#include <cmath>
#include <vector>

#include "flowbench/core/image.hpp"
#include "flowbench/core/warp.hpp"

namespace flowbench {

/// Coarse-to-fine image stack; level 0 is full resolution.
struct ImagePyramid {
    std::vector<GrayImage> levels;
    float scale = 0.5f;

    int level_count() const { return static_cast<int>(levels.size()); }
};

namespace detail {

/// 5-tap binomial smoothing ([1 4 6 4 1]/16 per axis), replicated borders.
inline GrayImage binomial_smooth(const GrayImage& img) {
    static const float k[5] = {1.0f / 16, 4.0f / 16, 6.0f / 16, 4.0f / 16, 1.0f / 16};
    GrayImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float acc = 0.0f;
            for (int t = -2; t <= 2; ++t) acc += k[t + 2] * img.at_clamped(x + t, y);
            tmp.at(x, y) = acc;
        }
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float acc = 0.0f;
            for (int t = -2; t <= 2; ++t) acc += k[t + 2] * tmp.at_clamped(x, y + t);
            out.at(x, y) = acc;
        }
    return out;
}

} // namespace detail

/// Each coarser level: smooth, then resample to ceil(prev * scale), floored at 4x4.
inline ImagePyramid build_pyramid(const GrayImage& img, int levels, float scale) {
    if (img.width < 4 || img.height < 4)
        throw InvalidInput("build_pyramid: image must be at least 4x4");
    if (levels < 1) throw InvalidInput("build_pyramid: levels must be >= 1");
    if (!(scale > 0.0f && scale < 1.0f))
        throw InvalidInput("build_pyramid: scale must lie in (0,1)");

    ImagePyramid pyr;
    pyr.scale = scale;
    pyr.levels.reserve(static_cast<size_t>(levels));
    pyr.levels.push_back(img);
    for (int l = 1; l < levels; ++l) {
        const GrayImage& prev = pyr.levels.back();
        int w = static_cast<int>(std::ceil(static_cast<double>(prev.width) * scale));
        int h = static_cast<int>(std::ceil(static_cast<double>(prev.height) * scale));
        w = w < 4 ? 4 : w;
        h = h < 4 ? 4 : h;
        pyr.levels.push_back(resize_bilinear(detail::binomial_smooth(prev), w, h));
    }
    return pyr;
}

} // namespace flowbench
