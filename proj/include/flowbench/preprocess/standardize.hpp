#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "flowbench/core/image.hpp"
#include "flowbench/core/warp.hpp"
#include "flowbench/preprocess/landmarks.hpp"

namespace flowbench::preprocess {

inline constexpr int kStandardFaceSize = 50;

/// Remaps luminance to an exactly uniform histogram: pixels are strictly
/// ordered by (value, row, column) and assigned the ramp (k + 0.5) / N.
inline GrayImage exact_histogram_specification(const GrayImage& img) {
    const size_t n = img.pixel_count();
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return img.data[a] < img.data[b]; });
    GrayImage out(img.width, img.height);
    for (size_t k = 0; k < n; ++k)
        out.data[order[k]] = static_cast<float>((k + 0.5) / static_cast<double>(n));
    return out;
}

struct StandardizedFace {
    GrayImage image;          // kStandardFaceSize x kStandardFaceSize
    LandmarkSet landmarks;    // mapped through the same transform
    double rotation_angle = 0.0; // radians removed to level the inter-ocular axis
};

/// Rotate (inter-ocular axis leveled), crop (landmark bbox + 10%), exact
/// histogram specification, resize to 50x50.
inline StandardizedFace standardize_face(const GrayImage& frame, const LandmarkSet& lm) {
    const Point2 left_eye = lm.mean_of(kLeftEyeFirst, kLeftEyeLast);
    const Point2 right_eye = lm.mean_of(kRightEyeFirst, kRightEyeLast);
    const double ex = right_eye.x - left_eye.x;
    const double ey = right_eye.y - left_eye.y;
    if (std::hypot(ex, ey) < 1e-9)
        throw InvalidInput("standardize_face: degenerate landmarks (zero inter-ocular distance)");
    const double angle = std::atan2(ey, ex);
    const double ca = std::cos(-angle), sa = std::sin(-angle);
    const Point2 pivot{(left_eye.x + right_eye.x) / 2.0, (left_eye.y + right_eye.y) / 2.0};

    auto rotate = [&](const Point2& p) -> Point2 {
        const double dx = p.x - pivot.x, dy = p.y - pivot.y;
        return {pivot.x + ca * dx - sa * dy, pivot.y + sa * dx + ca * dy};
    };
    auto unrotate = [&](double x, double y) -> Point2 {
        const double dx = x - pivot.x, dy = y - pivot.y;
        return {pivot.x + ca * dx + sa * dy, pivot.y - sa * dx + ca * dy};
    };

    std::vector<Point2> rotated(68);
    double x0 = 1e18, y0 = 1e18, x1 = -1e18, y1 = -1e18;
    for (int i = 0; i < 68; ++i) {
        rotated[i] = rotate(lm[i]);
        x0 = std::min(x0, rotated[i].x);
        x1 = std::max(x1, rotated[i].x);
        y0 = std::min(y0, rotated[i].y);
        y1 = std::max(y1, rotated[i].y);
    }
    double bw = x1 - x0, bh = y1 - y0;
    if (bw < 2.0 || bh < 2.0)
        throw InvalidInput("standardize_face: degenerate landmark bounding box");
    const double cx = (x0 + x1) / 2.0, cy = (y0 + y1) / 2.0;
    bw *= 1.1;
    bh *= 1.1;
    x0 = cx - bw / 2.0;
    y0 = cy - bh / 2.0;

    // Materialize the rotated crop at its natural resolution.
    const int cw = std::max(2, static_cast<int>(std::lround(bw)));
    const int ch = std::max(2, static_cast<int>(std::lround(bh)));
    GrayImage crop(cw, ch);
    for (int j = 0; j < ch; ++j)
        for (int i = 0; i < cw; ++i) {
            // crop pixel center in rotated coordinates, then back to the frame
            const Point2 src = unrotate(x0 + (i + 0.5) * bw / cw, y0 + (j + 0.5) * bh / ch);
            crop.at(i, j) = bilinear_sample(frame, static_cast<float>(src.x),
                                            static_cast<float>(src.y));
        }

    StandardizedFace out;
    out.rotation_angle = angle;
    out.image = resize_bilinear(exact_histogram_specification(crop), kStandardFaceSize,
                                kStandardFaceSize);

    std::vector<Point2> mapped(68);
    for (int i = 0; i < 68; ++i) {
        const double ci = (rotated[i].x - x0) * cw / bw - 0.5;
        const double cj = (rotated[i].y - y0) * ch / bh - 0.5;
        mapped[i] = {(ci + 0.5) * kStandardFaceSize / cw - 0.5,
                     (cj + 0.5) * kStandardFaceSize / ch - 0.5};
    }
    out.landmarks = LandmarkSet(std::move(mapped));
    return out;
}

} // namespace flowbench::preprocess
