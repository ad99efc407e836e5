#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <vector>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/image.hpp"
#include "flowbench/core/pyramid.hpp"
#include "flowbench/core/warp.hpp"
#include "flowbench/engines/farneback.hpp" // resample_flow
#include "flowbench/engines/params.hpp"

namespace flowbench::engines {

namespace detail {

/// Sum of absolute differences between the patch around (x,y) in `query`
/// and the patch around (x+u, y+v) in `target`; aborts once `limit` is hit.
inline double patch_sad(const GrayImage& query, const GrayImage& target, int x, int y, float u,
                        float v, int radius, double limit) {
    double acc = 0.0;
    const bool integral = u == std::floor(u) && v == std::floor(v);
    const int iu = static_cast<int>(u), iv = static_cast<int>(v);
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const float q = query.at_clamped(x + dx, y + dy);
            const float t = integral
                                ? target.at_clamped(x + iu + dx, y + iv + dy)
                                : bilinear_sample(target, static_cast<float>(x + dx) + u,
                                                  static_cast<float>(y + dy) + v);
            acc += std::abs(static_cast<double>(q) - t);
        }
        if (acc >= limit) return acc;
    }
    return acc;
}

/// One full correspondence search: query pixels matched into target.
inline FlowField nnf_search(const GrayImage& query, const GrayImage& target,
                            const PatchMatchParams& params, int levels, std::mt19937_64& rng) {
    const ImagePyramid pq = build_pyramid(query, levels, 0.5f);
    const ImagePyramid pt = build_pyramid(target, levels, 0.5f);

    const double full_min_side = std::min(query.width, query.height);
    const double base_radius =
        params.random_search_radius > 0 ? params.random_search_radius : full_min_side;

    FlowField nnf;
    std::vector<double> cost;
    for (int level = levels - 1; level >= 0; --level) {
        const GrayImage& q = pq.levels[level];
        const GrayImage& t = pt.levels[level];
        const int w = q.width, h = q.height;
        const int r = params.patch_radius;
        const double search_radius = base_radius * std::min(w, h) / full_min_side;

        auto clamp_disp = [&](int x, int y, float& u, float& v) {
            u = std::clamp(u, static_cast<float>(-x), static_cast<float>(w - 1 - x));
            v = std::clamp(v, static_cast<float>(-y), static_cast<float>(h - 1 - y));
        };

        cost.assign(static_cast<size_t>(w) * h, 0.0);
        if (level == levels - 1) {
            // Best of the zero displacement and one seeded random sample.
            nnf = FlowField(w, h);
            std::uniform_real_distribution<float> dist(-static_cast<float>(search_radius),
                                                       static_cast<float>(search_radius));
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double zero_sad =
                        patch_sad(q, t, x, y, 0.0f, 0.0f, r, std::numeric_limits<double>::max());
                    float cu = dist(rng), cv = dist(rng);
                    clamp_disp(x, y, cu, cv);
                    const double cand_sad = patch_sad(q, t, x, y, cu, cv, r, zero_sad);
                    if (cand_sad < zero_sad) {
                        nnf.at(x, y) = {cu, cv};
                        cost[static_cast<size_t>(y) * w + x] = cand_sad;
                    } else {
                        cost[static_cast<size_t>(y) * w + x] = zero_sad;
                    }
                }
        } else {
            nnf = resample_flow(nnf, w, h);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    FlowVec& d = nnf.at(x, y);
                    clamp_disp(x, y, d.u, d.v);
                    cost[static_cast<size_t>(y) * w + x] =
                        patch_sad(q, t, x, y, d.u, d.v, r, std::numeric_limits<double>::max());
                }
        }

        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int iter = 0; iter < params.propagation_iterations; ++iter) {
            const bool forward = iter % 2 == 0;
            const int ys = forward ? 0 : h - 1, ye = forward ? h : -1, step = forward ? 1 : -1;
            for (int y = ys; y != ye; y += step) {
                for (int x = forward ? 0 : w - 1; x != (forward ? w : -1); x += step) {
                    const size_t i = static_cast<size_t>(y) * w + x;
                    FlowVec best = nnf.at(x, y);
                    double best_sad = cost[i];

                    auto try_candidate = [&](float cu, float cv) {
                        clamp_disp(x, y, cu, cv);
                        if (cu == best.u && cv == best.v) return;
                        const double sad = patch_sad(q, t, x, y, cu, cv, r, best_sad);
                        if (sad < best_sad) {
                            best_sad = sad;
                            best = {cu, cv};
                        }
                    };

                    // scanline propagation
                    const int px = x - step, py = y - step;
                    if (px >= 0 && px < w) try_candidate(nnf.at(px, y).u, nnf.at(px, y).v);
                    if (py >= 0 && py < h) try_candidate(nnf.at(x, py).u, nnf.at(x, py).v);

                    // exponentially decaying random search around the current best
                    if (best_sad > 1e-9) {
                        for (double rad = search_radius; rad >= 0.5; rad *= params.search_decay) {
                            try_candidate(best.u + static_cast<float>(rad * unit(rng)),
                                          best.v + static_cast<float>(rad * unit(rng)));
                        }
                    }
                    nnf.at(x, y) = best;
                    cost[i] = best_sad;
                }
            }
        }
    }
    return nnf;
}

/// Nearest-surviving-inlier fill: multi-source BFS over the 4-neighborhood,
/// seeded with inliers in row-major order.
inline void fill_from_inliers(FlowField& flow, const std::vector<uint8_t>& inlier) {
    const int w = flow.width, h = flow.height;
    std::deque<int> queue;
    std::vector<uint8_t> visited(inlier);
    bool any_inlier = false;
    for (int i = 0; i < w * h; ++i)
        if (inlier[i]) {
            queue.push_back(i);
            any_inlier = true;
        }
    if (!any_inlier) return; // degenerate: keep the raw field
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        const int x = i % w, y = i / w;
        static const int dx[4] = {1, -1, 0, 0};
        static const int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int j = ny * w + nx;
            if (visited[j]) continue;
            visited[j] = 1;
            flow.vectors[j] = flow.vectors[i];
            queue.push_back(j);
        }
    }
}

} // namespace detail

/// FlowFields-style dense correspondence search: seeded random init,
/// scanline propagation, decaying random search over patch SAD, a
/// forward-backward consistency check, and nearest-inlier hole filling.
/// Deterministic given params.rng_seed. Returns d with prev(x+d) ~= next(x).
inline FlowField patchmatch_flow(const GrayImage& prev, const GrayImage& next,
                                 const PatchMatchParams& params = {},
                                 std::vector<uint8_t>* inlier_mask = nullptr) {
    params.validate();
    if (!prev.same_size(next)) throw InvalidInput("patchmatch_flow: dimension mismatch");
    const int min_side = std::min(prev.width, prev.height);
    if (min_side <= 2 * params.patch_radius + 1)
        throw InvalidInput("patchmatch_flow: image min side must exceed the patch diameter");

    // Clamp the hierarchy so the coarsest level still fits a patch.
    int levels = params.hierarchy_levels;
    while (levels > 1 && min_side / (1 << (levels - 1)) <= 2 * params.patch_radius + 1) --levels;

    std::mt19937_64 rng_fwd(params.rng_seed);
    std::mt19937_64 rng_bwd(params.rng_seed + 0x9e3779b97f4a7c15ULL);
    FlowField fwd = detail::nnf_search(next, prev, params, levels, rng_fwd);
    const FlowField bwd = detail::nnf_search(prev, next, params, levels, rng_bwd);

    const int w = fwd.width, h = fwd.height;
    std::vector<uint8_t> inlier(static_cast<size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const FlowVec& f = fwd.at(x, y);
            const int bx = std::clamp(static_cast<int>(std::lround(x + f.u)), 0, w - 1);
            const int by = std::clamp(static_cast<int>(std::lround(y + f.v)), 0, h - 1);
            const FlowVec& b = bwd.at(bx, by);
            const double round_trip = std::hypot(static_cast<double>(f.u) + b.u,
                                                 static_cast<double>(f.v) + b.v);
            inlier[static_cast<size_t>(y) * w + x] = round_trip <= params.fb_consistency_threshold;
        }
    detail::fill_from_inliers(fwd, inlier);
    if (inlier_mask) *inlier_mask = std::move(inlier);
    return fwd;
}

} // namespace flowbench::engines
