#pragma once

#include <cmath>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/image.hpp"

namespace flowbench {

/// Bilinear sample with clamp-to-edge borders.
inline float bilinear_sample(const GrayImage& img, float fx, float fy) {
    if (fx < 0.0f) fx = 0.0f;
    if (fy < 0.0f) fy = 0.0f;
    const float mx = static_cast<float>(img.width - 1);
    const float my = static_cast<float>(img.height - 1);
    if (fx > mx) fx = mx;
    if (fy > my) fy = my;

    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const int x1 = x0 + 1 < img.width ? x0 + 1 : x0;
    const int y1 = y0 + 1 < img.height ? y0 + 1 : y0;
    const float wx = fx - static_cast<float>(x0);
    const float wy = fy - static_cast<float>(y0);

    const float top = (1.0f - wx) * img.at(x0, y0) + wx * img.at(x1, y0);
    const float bot = (1.0f - wx) * img.at(x0, y1) + wx * img.at(x1, y1);
    return (1.0f - wy) * top + wy * bot;
}

/// Backward warp: out(x,y) = img sampled at (x+u, y+v), borders clamped.
inline GrayImage warp_image(const GrayImage& img, const FlowField& flow) {
    if (img.width != flow.width || img.height != flow.height)
        throw InvalidInput("warp_image: image " + std::to_string(img.width) + "x" +
                           std::to_string(img.height) + " vs flow " +
                           std::to_string(flow.width) + "x" + std::to_string(flow.height));
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const FlowVec& d = flow.at(x, y);
            out.at(x, y) = bilinear_sample(img, static_cast<float>(x) + d.u,
                                           static_cast<float>(y) + d.v);
        }
    }
    return out;
}

/// General bilinear resize to (new_w, new_h); pixel centers aligned.
inline GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h) {
    GrayImage out(new_w, new_h);
    const float sx = static_cast<float>(img.width) / static_cast<float>(new_w);
    const float sy = static_cast<float>(img.height) / static_cast<float>(new_h);
    for (int y = 0; y < new_h; ++y) {
        const float fy = (static_cast<float>(y) + 0.5f) * sy - 0.5f;
        for (int x = 0; x < new_w; ++x) {
            const float fx = (static_cast<float>(x) + 0.5f) * sx - 0.5f;
            out.at(x, y) = bilinear_sample(img, fx, fy);
        }
    }
    return out;
}

} // namespace flowbench
