#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/image.hpp"
#include "flowbench/core/pyramid.hpp"
#include "flowbench/engines/farneback.hpp" // resample_flow
#include "flowbench/engines/params.hpp"

namespace flowbench::engines {

/// Per-warp discrete energy trace at each pyramid level (finest last).
struct TvL1Trace {
    std::vector<std::vector<double>> energy_per_warp_by_level;

    const std::vector<double>& finest() const { return energy_per_warp_by_level.back(); }
};

namespace detail {

// Intensities are rescaled to [0,255] inside the solver so lambda keeps its
// conventional calibration; spec images live in [0,1].
struct TvL1Level {
    int w = 0, h = 0;
    std::vector<double> ref;    // I0 (next)
    std::vector<double> mov;    // I1 (prev), warped toward ref
    std::vector<double> movx, movy;
};

inline void centered_gradient(const std::vector<double>& im, int w, int h,
                              std::vector<double>& gx, std::vector<double>& gy) {
    gx.assign(im.size(), 0.0);
    gy.assign(im.size(), 0.0);
    auto at = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return im[static_cast<size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            gx[i] = 0.5 * (at(x + 1, y) - at(x - 1, y));
            gy[i] = 0.5 * (at(x, y + 1) - at(x, y - 1));
        }
}

inline double bilinear_d(const std::vector<double>& im, int w, int h, double fx, double fy) {
    fx = std::clamp(fx, 0.0, static_cast<double>(w - 1));
    fy = std::clamp(fy, 0.0, static_cast<double>(h - 1));
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double wx = fx - x0, wy = fy - y0;
    const double top = (1 - wx) * im[static_cast<size_t>(y0) * w + x0] + wx * im[static_cast<size_t>(y0) * w + x1];
    const double bot = (1 - wx) * im[static_cast<size_t>(y1) * w + x0] + wx * im[static_cast<size_t>(y1) * w + x1];
    return (1 - wy) * top + wy * bot;
}

/// Forward differences, Neumann boundary (zero on the last row/column).
inline void forward_gradient(const std::vector<double>& u, int w, int h,
                             std::vector<double>& ux, std::vector<double>& uy) {
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            ux[i] = x + 1 < w ? u[i + 1] - u[i] : 0.0;
            uy[i] = y + 1 < h ? u[i + w] - u[i] : 0.0;
        }
}

/// Adjoint of the forward gradient.
inline void divergence(const std::vector<double>& px, const std::vector<double>& py, int w, int h,
                       std::vector<double>& div) {
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            double d = 0.0;
            if (x == 0)
                d += px[i];
            else if (x == w - 1)
                d -= px[i - 1];
            else
                d += px[i] - px[i - 1];
            if (y == 0)
                d += py[i];
            else if (y == h - 1)
                d -= py[i - w];
            else
                d += py[i] - py[i - w];
            div[i] = d;
        }
}

/// E(u) = sum lambda |I1(x+u) - I0(x)| + |grad u1| + |grad u2|.
inline double tvl1_energy(const TvL1Level& L, const std::vector<double>& u1,
                          const std::vector<double>& u2, double lambda) {
    const int w = L.w, h = L.h;
    double e = 0.0;
    std::vector<double> gx(u1.size()), gy(u1.size());
    forward_gradient(u1, w, h, gx, gy);
    for (size_t i = 0; i < u1.size(); ++i) e += std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
    forward_gradient(u2, w, h, gx, gy);
    for (size_t i = 0; i < u1.size(); ++i) e += std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            const double rho = bilinear_d(L.mov, w, h, x + u1[i], y + u2[i]) - L.ref[i];
            e += lambda * std::abs(rho);
        }
    return e;
}

} // namespace detail

/// Duality-based TV-L1 flow (coarse-to-fine, warping + thresholding +
/// dual ascent). Returns d with prev(x + d) ~= next(x). A warp whose
/// energy increases is rolled back, which keeps the per-warp energy
/// trace non-increasing.
inline FlowField tvl1_flow(const GrayImage& prev, const GrayImage& next,
                           const TvL1Params& params = {}, TvL1Trace* trace = nullptr) {
    params.validate();
    if (!prev.same_size(next)) throw InvalidInput("tvl1_flow: dimension mismatch");

    const ImagePyramid pp = build_pyramid(prev, params.pyramid_levels, params.pyramid_scale);
    const ImagePyramid pn = build_pyramid(next, params.pyramid_levels, params.pyramid_scale);

    // Joint rescale of both inputs to [0,255].
    float lo = 1.0f, hi = 0.0f;
    for (float v : prev.data) { lo = std::min(lo, v); hi = std::max(hi, v); }
    for (float v : next.data) { lo = std::min(lo, v); hi = std::max(hi, v); }
    const double span = hi > lo ? 255.0 / (hi - lo) : 0.0;

    if (trace) trace->energy_per_warp_by_level.clear();

    const double l_t = params.lambda * params.theta;
    const double taut = params.tau / params.theta;

    FlowField flow;
    for (int level = params.pyramid_levels - 1; level >= 0; --level) {
        const GrayImage& gp = pp.levels[level];
        const GrayImage& gn = pn.levels[level];
        const int w = gp.width, h = gp.height;
        const size_t n = static_cast<size_t>(w) * h;

        detail::TvL1Level L;
        L.w = w;
        L.h = h;
        L.ref.resize(n);
        L.mov.resize(n);
        for (size_t i = 0; i < n; ++i) {
            L.ref[i] = (gn.data[i] - lo) * span;
            L.mov[i] = (gp.data[i] - lo) * span;
        }
        detail::centered_gradient(L.mov, w, h, L.movx, L.movy);

        if (level == params.pyramid_levels - 1)
            flow = FlowField(w, h);
        else
            flow = resample_flow(flow, w, h);

        std::vector<double> u1(n), u2(n);
        for (size_t i = 0; i < n; ++i) {
            u1[i] = flow.vectors[i].u;
            u2[i] = flow.vectors[i].v;
        }
        std::vector<double> p11(n, 0.0), p12(n, 0.0), p21(n, 0.0), p22(n, 0.0);
        std::vector<double> i1w(n), i1wx(n), i1wy(n), grad(n), rho_c(n);
        std::vector<double> v1(n), v2(n), div_p(n), gx(n), gy(n);

        std::vector<double> energies;
        double prev_energy = detail::tvl1_energy(L, u1, u2, params.lambda);

        for (int warp = 0; warp < params.warps_per_level; ++warp) {
            const std::vector<double> u1_backup = u1, u2_backup = u2;

            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const size_t i = static_cast<size_t>(y) * w + x;
                    i1w[i] = detail::bilinear_d(L.mov, w, h, x + u1[i], y + u2[i]);
                    i1wx[i] = detail::bilinear_d(L.movx, w, h, x + u1[i], y + u2[i]);
                    i1wy[i] = detail::bilinear_d(L.movy, w, h, x + u1[i], y + u2[i]);
                    grad[i] = i1wx[i] * i1wx[i] + i1wy[i] * i1wy[i];
                    rho_c[i] = i1w[i] - i1wx[i] * u1[i] - i1wy[i] * u2[i] - L.ref[i];
                }

            for (int iter = 0; iter < params.inner_iterations; ++iter) {
                // (a) closed-form thresholding on the auxiliary field
                for (size_t i = 0; i < n; ++i) {
                    const double rho = rho_c[i] + i1wx[i] * u1[i] + i1wy[i] * u2[i];
                    double d1, d2;
                    if (rho < -l_t * grad[i]) {
                        d1 = l_t * i1wx[i];
                        d2 = l_t * i1wy[i];
                    } else if (rho > l_t * grad[i]) {
                        d1 = -l_t * i1wx[i];
                        d2 = -l_t * i1wy[i];
                    } else if (grad[i] > 1e-10) {
                        const double fi = -rho / grad[i];
                        d1 = fi * i1wx[i];
                        d2 = fi * i1wy[i];
                    } else {
                        d1 = d2 = 0.0;
                    }
                    v1[i] = u1[i] + d1;
                    v2[i] = u2[i] + d2;
                }

                // (b) flow from the dual variable, then one dual-ascent step
                double max_update = 0.0;
                detail::divergence(p11, p12, w, h, div_p);
                for (size_t i = 0; i < n; ++i) {
                    const double nu = v1[i] + params.theta * div_p[i];
                    max_update = std::max(max_update, std::abs(nu - u1[i]));
                    u1[i] = nu;
                }
                detail::divergence(p21, p22, w, h, div_p);
                for (size_t i = 0; i < n; ++i) {
                    const double nu = v2[i] + params.theta * div_p[i];
                    max_update = std::max(max_update, std::abs(nu - u2[i]));
                    u2[i] = nu;
                }

                detail::forward_gradient(u1, w, h, gx, gy);
                for (size_t i = 0; i < n; ++i) {
                    const double ng = 1.0 + taut * std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
                    p11[i] = (p11[i] + taut * gx[i]) / ng;
                    p12[i] = (p12[i] + taut * gy[i]) / ng;
                }
                detail::forward_gradient(u2, w, h, gx, gy);
                for (size_t i = 0; i < n; ++i) {
                    const double ng = 1.0 + taut * std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
                    p21[i] = (p21[i] + taut * gx[i]) / ng;
                    p22[i] = (p22[i] + taut * gy[i]) / ng;
                }

                if (max_update < params.stop_epsilon) break;
            }

            const double energy = detail::tvl1_energy(L, u1, u2, params.lambda);
            if (energy > prev_energy) {
                u1 = u1_backup;
                u2 = u2_backup;
                break;
            }
            energies.push_back(energy);
            prev_energy = energy;
        }

        for (size_t i = 0; i < n; ++i)
            flow.vectors[i] = {static_cast<float>(u1[i]), static_cast<float>(u2[i])};
        if (trace) trace->energy_per_warp_by_level.push_back(std::move(energies));
    }
    return flow;
}

} // namespace flowbench::engines
