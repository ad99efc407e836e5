#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/image.hpp"
#include "flowbench/core/pyramid.hpp"
#include "flowbench/engines/params.hpp"

namespace flowbench::engines {

namespace detail {

/// Per-pixel quadratic expansion f(p+d) ~= c + b.d + d'Ad, stored as
/// {b_x, b_y, a_xx, a_yy, a_xy} planes (c cancels in displacement estimation).
struct PolyExpansion {
    int width = 0;
    int height = 0;
    std::vector<float> coeff; // 5 floats per pixel

    const float* at(int x, int y) const {
        return coeff.data() + (static_cast<size_t>(y) * width + x) * 5;
    }
    float* at(int x, int y) { return coeff.data() + (static_cast<size_t>(y) * width + x) * 5; }
};

/// Weighted least-squares quadratic fit per pixel with Gaussian applicability
/// of width sigma over a (2n+1)^2 neighborhood, borders replicated.
/// Intensities are scaled to 0..255 so the solver regularization keeps its
/// conventional calibration.
inline PolyExpansion polynomial_expansion(const GrayImage& img, int n, double sigma) {
    constexpr double kIntensityScale = 255.0;
    const int w = img.width, h = img.height;
    std::vector<double> g(2 * n + 1), tg(2 * n + 1), ttg(2 * n + 1);
    double norm = 0.0;
    for (int t = -n; t <= n; ++t) norm += std::exp(-t * t / (2.0 * sigma * sigma));
    double sig2 = 0.0, sig4 = 0.0;
    for (int t = -n; t <= n; ++t) {
        const double gv = std::exp(-t * t / (2.0 * sigma * sigma)) / norm;
        g[t + n] = gv;
        tg[t + n] = t * gv;
        ttg[t + n] = t * t * gv;
        sig2 += t * t * gv;
        sig4 += t * t * t * t * gv;
    }
    const double dsep = sig4 - sig2 * sig2; // separation after eliminating the constant

    // Vertical pass: (s0, s1, s2) = correlations with g, tg, ttg along y.
    std::vector<double> vert(static_cast<size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            for (int t = -n; t <= n; ++t) {
                const double f = kIntensityScale * img.at_clamped(x, y + t);
                s0 += g[t + n] * f;
                s1 += tg[t + n] * f;
                s2 += ttg[t + n] * f;
            }
            double* p = vert.data() + (static_cast<size_t>(y) * w + x) * 3;
            p[0] = s0;
            p[1] = s1;
            p[2] = s2;
        }
    }

    PolyExpansion out;
    out.width = w;
    out.height = h;
    out.coeff.resize(static_cast<size_t>(w) * h * 5);
    for (int y = 0; y < h; ++y) {
        const double* row = vert.data() + static_cast<size_t>(y) * w * 3;
        for (int x = 0; x < w; ++x) {
            double m00 = 0, m10 = 0, m01 = 0, m20 = 0, m02 = 0, m11 = 0;
            for (int t = -n; t <= n; ++t) {
                int xc = x + t;
                xc = xc < 0 ? 0 : (xc >= w ? w - 1 : xc);
                const double* p = row + static_cast<size_t>(xc) * 3;
                m00 += g[t + n] * p[0];
                m10 += tg[t + n] * p[0];
                m20 += ttg[t + n] * p[0];
                m01 += g[t + n] * p[1];
                m11 += tg[t + n] * p[1];
                m02 += g[t + n] * p[2];
            }
            float* c = out.at(x, y);
            c[0] = static_cast<float>(m10 / sig2);                 // b_x
            c[1] = static_cast<float>(m01 / sig2);                 // b_y
            c[2] = static_cast<float>((m20 - sig2 * m00) / dsep);  // a_xx
            c[3] = static_cast<float>((m02 - sig2 * m00) / dsep);  // a_yy
            c[4] = static_cast<float>(m11 / (2.0 * sig2 * sig2));  // a_xy
        }
    }
    return out;
}

/// Per-pixel normal-equation entries {G11, G12, G22, h1, h2} for the
/// displacement least squares, before window averaging.
inline void displacement_matrices(const PolyExpansion& prev_poly, const PolyExpansion& next_poly,
                                  const FlowField& flow, std::vector<double>& m) {
    static const double kBorderWeight[5] = {0.14, 0.14, 0.4472, 0.4472, 0.4472};
    const int w = next_poly.width, h = next_poly.height;
    m.assign(static_cast<size_t>(w) * h * 5, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const FlowVec& d = flow.at(x, y);
            const float* cn = next_poly.at(x, y);
            const float qx = static_cast<float>(x) + d.u;
            const float qy = static_cast<float>(y) + d.v;

            double axx, ayy, axy, dbx, dby;
            if (qx >= 0.0f && qx <= w - 1.0f && qy >= 0.0f && qy <= h - 1.0f) {
                // Bilinear lookup of the prev-image expansion at the displaced position.
                const int x0 = static_cast<int>(qx), y0 = static_cast<int>(qy);
                const int x1 = x0 + 1 < w ? x0 + 1 : x0;
                const int y1 = y0 + 1 < h ? y0 + 1 : y0;
                const double wx = qx - x0, wy = qy - y0;
                const float* c00 = prev_poly.at(x0, y0);
                const float* c10 = prev_poly.at(x1, y0);
                const float* c01 = prev_poly.at(x0, y1);
                const float* c11 = prev_poly.at(x1, y1);
                double cp[5];
                for (int c = 0; c < 5; ++c)
                    cp[c] = (1 - wy) * ((1 - wx) * c00[c] + wx * c10[c]) +
                            wy * ((1 - wx) * c01[c] + wx * c11[c]);
                axx = 0.5 * (cn[2] + cp[2]);
                ayy = 0.5 * (cn[3] + cp[3]);
                axy = 0.5 * (cn[4] + cp[4]);
                dbx = axx * d.u + axy * d.v + 0.5 * (cn[0] - cp[0]);
                dby = axy * d.u + ayy * d.v + 0.5 * (cn[1] - cp[1]);
            } else {
                axx = cn[2];
                ayy = cn[3];
                axy = cn[4];
                dbx = axx * d.u + axy * d.v; // no data term, pulls toward the prior
                dby = axy * d.u + ayy * d.v;
            }

            double s = 1.0;
            if (x < 5) s *= kBorderWeight[x];
            if (y < 5) s *= kBorderWeight[y];
            if (x >= w - 5) s *= kBorderWeight[w - 1 - x];
            if (y >= h - 5) s *= kBorderWeight[h - 1 - y];
            axx *= s;
            ayy *= s;
            axy *= s;
            dbx *= s;
            dby *= s;

            double* o = m.data() + (static_cast<size_t>(y) * w + x) * 5;
            o[0] = axx * axx + axy * axy;
            o[1] = axy * (axx + ayy);
            o[2] = ayy * ayy + axy * axy;
            o[3] = axx * dbx + axy * dby;
            o[4] = axy * dbx + ayy * dby;
        }
    }
}

/// Averages the 5 matrix channels over window x window (clipped at borders)
/// via summed-area tables, then solves the 2x2 system per pixel.
inline void solve_displacement(const std::vector<double>& m, int w, int h, int window,
                               FlowField& flow) {
    const int r = window / 2;
    const size_t sw = static_cast<size_t>(w) + 1;
    std::vector<double> sat(sw * (h + 1) * 5, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 5; ++c) {
                const double v = m[(static_cast<size_t>(y) * w + x) * 5 + c];
                sat[((y + 1) * sw + (x + 1)) * 5 + c] = v + sat[((y + 1) * sw + x) * 5 + c] +
                                                        sat[(y * sw + (x + 1)) * 5 + c] -
                                                        sat[(y * sw + x) * 5 + c];
            }
    auto box = [&](int x0, int y0, int x1, int y1, int c) {
        return sat[((y1 + 1) * sw + (x1 + 1)) * 5 + c] - sat[((y1 + 1) * sw + x0) * 5 + c] -
               sat[(y0 * sw + (x1 + 1)) * 5 + c] + sat[(y0 * sw + x0) * 5 + c];
    };
    for (int y = 0; y < h; ++y) {
        const int y0 = y - r < 0 ? 0 : y - r;
        const int y1 = y + r >= h ? h - 1 : y + r;
        for (int x = 0; x < w; ++x) {
            const int x0 = x - r < 0 ? 0 : x - r;
            const int x1 = x + r >= w ? w - 1 : x + r;
            const double area = static_cast<double>(x1 - x0 + 1) * (y1 - y0 + 1);
            const double g11 = box(x0, y0, x1, y1, 0) / area;
            const double g12 = box(x0, y0, x1, y1, 1) / area;
            const double g22 = box(x0, y0, x1, y1, 2) / area;
            const double h1 = box(x0, y0, x1, y1, 3) / area;
            const double h2 = box(x0, y0, x1, y1, 4) / area;
            const double idet = 1.0 / (g11 * g22 - g12 * g12 + 1e-3);
            flow.at(x, y) = {static_cast<float>((g22 * h1 - g12 * h2) * idet),
                             static_cast<float>((g11 * h2 - g12 * h1) * idet)};
        }
    }
}

} // namespace detail

/// Bilinear resample of a flow field with per-axis vector rescaling.
inline FlowField resample_flow(const FlowField& flow, int new_w, int new_h) {
    FlowField out(new_w, new_h);
    const float rx = static_cast<float>(new_w) / static_cast<float>(flow.width);
    const float ry = static_cast<float>(new_h) / static_cast<float>(flow.height);
    for (int y = 0; y < new_h; ++y) {
        float fy = (static_cast<float>(y) + 0.5f) / ry - 0.5f;
        fy = fy < 0.0f ? 0.0f : (fy > flow.height - 1 ? flow.height - 1 : fy);
        const int y0 = static_cast<int>(fy);
        const int y1 = y0 + 1 < flow.height ? y0 + 1 : y0;
        const float wy = fy - y0;
        for (int x = 0; x < new_w; ++x) {
            float fx = (static_cast<float>(x) + 0.5f) / rx - 0.5f;
            fx = fx < 0.0f ? 0.0f : (fx > flow.width - 1 ? flow.width - 1 : fx);
            const int x0 = static_cast<int>(fx);
            const int x1 = x0 + 1 < flow.width ? x0 + 1 : x0;
            const float wx = fx - x0;
            const FlowVec& a = flow.at(x0, y0);
            const FlowVec& b = flow.at(x1, y0);
            const FlowVec& c = flow.at(x0, y1);
            const FlowVec& d = flow.at(x1, y1);
            const float u = (1 - wy) * ((1 - wx) * a.u + wx * b.u) + wy * ((1 - wx) * c.u + wx * d.u);
            const float v = (1 - wy) * ((1 - wx) * a.v + wx * b.v) + wy * ((1 - wx) * c.v + wx * d.v);
            out.at(x, y) = {u * rx, v * ry};
        }
    }
    return out;
}

/// Coarse-to-fine dense flow by iterative polynomial-expansion displacement
/// estimation. Returns d with prev(x + d) ~= next(x).
inline FlowField farneback_flow(const GrayImage& prev, const GrayImage& next,
                                const FarnebackParams& params = {}) {
    params.validate();
    if (!prev.same_size(next)) throw InvalidInput("farneback_flow: dimension mismatch");
    if (prev.width < params.poly_n || prev.height < params.poly_n)
        throw InvalidInput("farneback_flow: image smaller than poly_n neighborhood");

    const ImagePyramid pp = build_pyramid(prev, params.pyramid_levels, params.pyramid_scale);
    const ImagePyramid pn = build_pyramid(next, params.pyramid_levels, params.pyramid_scale);

    FlowField flow;
    std::vector<double> m;
    for (int level = params.pyramid_levels - 1; level >= 0; --level) {
        const GrayImage& lp = pp.levels[level];
        const GrayImage& ln = pn.levels[level];
        if (level == params.pyramid_levels - 1)
            flow = FlowField(lp.width, lp.height);
        else
            flow = resample_flow(flow, lp.width, lp.height);

        const detail::PolyExpansion ep = detail::polynomial_expansion(lp, params.poly_n / 2, params.poly_sigma);
        const detail::PolyExpansion en = detail::polynomial_expansion(ln, params.poly_n / 2, params.poly_sigma);
        for (int it = 0; it < params.iterations_per_level; ++it) {
            detail::displacement_matrices(ep, en, flow, m);
            detail::solve_displacement(m, lp.width, lp.height, params.window_size, flow);
        }
    }
    return flow;
}

} // namespace flowbench::engines
