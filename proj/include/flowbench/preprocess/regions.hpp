#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "flowbench/preprocess/landmarks.hpp"

namespace flowbench::preprocess {

/// Pixel ownership for the Eq.-style motion split: E = brows + eyes,
/// M = mouth, H = nose hull + contour band. Disjoint by construction
/// (priority E > M > H).
struct RegionPartition {
    enum class Region : uint8_t { none = 0, dynamic_eyes = 1, dynamic_mouth = 2, rigid_head = 3 };

    int width = 0;
    int height = 0;
    std::vector<Region> mask;

    Region at(int x, int y) const { return mask[static_cast<size_t>(y) * width + x]; }
    size_t count(Region r) const {
        size_t n = 0;
        for (Region v : mask) n += v == r;
        return n;
    }
};

namespace detail {

/// Monotone-chain convex hull (CCW). Throws when the hull degenerates.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    const size_t n = pts.size();
    if (n < 3) throw InvalidInput("region_partition: degenerate landmark group (empty hull)");
    std::vector<Point2> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw InvalidInput("region_partition: degenerate landmark group (empty hull)");
    return hull;
}

inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

/// True when p lies inside the CCW hull or within `dilate` of its boundary.
inline bool in_dilated_hull(const Point2& p, const std::vector<Point2>& hull, double dilate) {
    bool inside = true;
    for (size_t i = 0; i < hull.size(); ++i) {
        const Point2& a = hull[i];
        const Point2& b = hull[(i + 1) % hull.size()];
        if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0) {
            inside = false;
            break;
        }
    }
    if (inside) return true;
    for (size_t i = 0; i < hull.size(); ++i)
        if (point_segment_distance(p, hull[i], hull[(i + 1) % hull.size()]) <= dilate) return true;
    return false;
}

inline bool near_polyline(const Point2& p, const std::vector<Point2>& line, double radius) {
    for (size_t i = 0; i + 1 < line.size(); ++i)
        if (point_segment_distance(p, line[i], line[i + 1]) <= radius) return true;
    return false;
}

} // namespace detail

inline constexpr double kRegionDilationPx = 2.0;

inline RegionPartition region_partition(const LandmarkSet& lm, int width, int height) {
    std::vector<Point2> brows(lm.points.begin() + kBrowsFirst, lm.points.begin() + kBrowsLast + 1);
    std::vector<Point2> eyes(lm.points.begin() + kEyesFirst, lm.points.begin() + kEyesLast + 1);
    std::vector<Point2> mouth(lm.points.begin() + kMouthFirst, lm.points.begin() + kMouthLast + 1);
    std::vector<Point2> nose(lm.points.begin() + kNoseFirst, lm.points.begin() + kNoseLast + 1);
    std::vector<Point2> contour(lm.points.begin() + kContourFirst,
                                lm.points.begin() + kContourLast + 1);

    const auto hull_brows = detail::convex_hull(brows);
    const auto hull_eyes = detail::convex_hull(eyes);
    const auto hull_mouth = detail::convex_hull(mouth);
    const auto hull_nose = detail::convex_hull(nose);

    RegionPartition part;
    part.width = width;
    part.height = height;
    part.mask.assign(static_cast<size_t>(width) * height, RegionPartition::Region::none);
    using R = RegionPartition::Region;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const Point2 p{static_cast<double>(x), static_cast<double>(y)};
            R r = R::none;
            if (detail::in_dilated_hull(p, hull_brows, kRegionDilationPx) ||
                detail::in_dilated_hull(p, hull_eyes, kRegionDilationPx))
                r = R::dynamic_eyes;
            else if (detail::in_dilated_hull(p, hull_mouth, kRegionDilationPx))
                r = R::dynamic_mouth;
            else if (detail::in_dilated_hull(p, hull_nose, kRegionDilationPx) ||
                     detail::near_polyline(p, contour, kRegionDilationPx))
                r = R::rigid_head;
            part.mask[static_cast<size_t>(y) * width + x] = r;
        }

    if (part.count(R::dynamic_eyes) == 0 || part.count(R::dynamic_mouth) == 0 ||
        part.count(R::rigid_head) == 0)
        throw InvalidInput("region_partition: a region mask came out empty");
    return part;
}

} // namespace flowbench::preprocess
