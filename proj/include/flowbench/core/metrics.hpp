#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/image.hpp"

namespace flowbench {

/// Standard flow-benchmark error statistics.
struct FlowErrorStats {
    double mean_epe = 0.0;
    double max_epe = 0.0;
    double mean_angular_error = 0.0; // radians, on (u,v,1)-augmented vectors
    double inlier_fraction_0_5px = 0.0;
};

/// Optional pixel predicate; stats restricted to pixels where keep(x,y) is true.
template <typename Keep>
FlowErrorStats flow_error_where(const FlowField& flow, const FlowField& gt, Keep keep) {
    if (!flow.same_size(gt))
        throw InvalidInput("flow_error: dimension mismatch " + std::to_string(flow.width) + "x" +
                           std::to_string(flow.height) + " vs " + std::to_string(gt.width) + "x" +
                           std::to_string(gt.height));
    double sum_epe = 0.0, sum_ang = 0.0, max_epe = 0.0;
    long long n = 0, inliers = 0;
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            if (!keep(x, y)) continue;
            const FlowVec& a = flow.at(x, y);
            const FlowVec& b = gt.at(x, y);
            const double du = static_cast<double>(a.u) - b.u;
            const double dv = static_cast<double>(a.v) - b.v;
            const double epe = std::sqrt(du * du + dv * dv);
            sum_epe += epe;
            max_epe = std::max(max_epe, epe);
            if (epe < 0.5) ++inliers;

            const double dot = static_cast<double>(a.u) * b.u + static_cast<double>(a.v) * b.v + 1.0;
            const double na = std::sqrt(static_cast<double>(a.u) * a.u + static_cast<double>(a.v) * a.v + 1.0);
            const double nb = std::sqrt(static_cast<double>(b.u) * b.u + static_cast<double>(b.v) * b.v + 1.0);
            sum_ang += std::acos(std::clamp(dot / (na * nb), -1.0, 1.0));
            ++n;
        }
    }
    FlowErrorStats s;
    if (n > 0) {
        s.mean_epe = sum_epe / static_cast<double>(n);
        s.max_epe = max_epe;
        s.mean_angular_error = sum_ang / static_cast<double>(n);
        s.inlier_fraction_0_5px = static_cast<double>(inliers) / static_cast<double>(n);
    }
    return s;
}

inline FlowErrorStats flow_error(const FlowField& flow, const FlowField& gt) {
    return flow_error_where(flow, gt, [](int, int) { return true; });
}

/// Stats over the interior, excluding a uniform border band.
inline FlowErrorStats flow_error_interior(const FlowField& flow, const FlowField& gt, int border) {
    return flow_error_where(flow, gt, [&](int x, int y) {
        return x >= border && y >= border && x < flow.width - border && y < flow.height - border;
    });
}

/// PSNR in dB for [0,1] images over the interior (border excluded); +inf for identical inputs.
inline double psnr(const GrayImage& a, const GrayImage& b, int border = 0) {
    if (!a.same_size(b)) throw InvalidInput("psnr: dimension mismatch");
    double mse = 0.0;
    long long n = 0;
    for (int y = border; y < a.height - border; ++y)
        for (int x = border; x < a.width - border; ++x) {
            const double d = static_cast<double>(a.at(x, y)) - b.at(x, y);
            mse += d * d;
            ++n;
        }
    if (n == 0) throw InvalidInput("psnr: empty interior");
    mse /= static_cast<double>(n);
    if (mse <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

} // namespace flowbench
