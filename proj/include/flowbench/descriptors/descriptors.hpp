#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/polar.hpp"
#include "flowbench/error.hpp"

namespace flowbench::descriptors {

inline constexpr int kDirectionBins = 12;      // 30 degrees per bin
inline constexpr float kVoteMagnitudeFloor = 0.1f; // px; quieter pixels do not vote
inline constexpr double kCoherenceFraction = 0.5;  // LMP: aligned-neighbor quota
inline constexpr double kCoherenceAngleDeg = 30.0; // LMP: alignment tolerance

enum class DescriptorId { raw, hof, hoof, lmp };

inline std::string to_string(DescriptorId d) {
    switch (d) {
        case DescriptorId::raw: return "raw";
        case DescriptorId::hof: return "hof";
        case DescriptorId::hoof: return "hoof";
        case DescriptorId::lmp: return "lmp";
    }
    return {};
}

inline DescriptorId parse_descriptor_id(const std::string& s) {
    if (s == "raw") return DescriptorId::raw;
    if (s == "hof") return DescriptorId::hof;
    if (s == "hoof") return DescriptorId::hoof;
    if (s == "lmp") return DescriptorId::lmp;
    throw InvalidInput("unknown descriptor '" + s + "'");
}

/// Equal-division cell grid; remainder pixels go to the last row/column.
struct GridSpec {
    int rows = 5;
    int cols = 5;

    struct Cell {
        int x0, y0, x1, y1; // half-open
    };

    Cell cell(int r, int c, int width, int height) const {
        const int bw = width / cols, bh = height / rows;
        Cell out;
        out.x0 = c * bw;
        out.y0 = r * bh;
        out.x1 = c == cols - 1 ? width : (c + 1) * bw;
        out.y1 = r == rows - 1 ? height : (r + 1) * bh;
        return out;
    }

    int cell_count() const { return rows * cols; }
};

struct DescriptorOptions {
    bool magnitude_weighted = true; // false: each voting pixel counts 1
    bool fold_hoof_bins = false;    // fold left/right motion together (x-sign dropped)
};

struct FeatureVector {
    DescriptorId id = DescriptorId::raw;
    std::vector<double> values;

    bool is_grid() const { return id != DescriptorId::raw; }
    size_t size() const { return values.size(); }
};

inline constexpr size_t kRawFeatureLength = 7500; // 50*50*3
inline constexpr size_t kGridFeatureLength = 300; // 12*25

/// Concatenated polar planes (cos, sin, magnitude), each row-major.
inline FeatureVector raw_flow_vector(const FlowField& flow) {
    if (flow.width != 50 || flow.height != 50)
        throw InvalidInput("raw_flow_vector: expects a 50x50 flow, got " +
                           std::to_string(flow.width) + "x" + std::to_string(flow.height));
    const PolarPlanes p = flow_to_polar(flow);
    FeatureVector out;
    out.id = DescriptorId::raw;
    out.values.reserve(kRawFeatureLength);
    out.values.insert(out.values.end(), p.cos_plane.begin(), p.cos_plane.end());
    out.values.insert(out.values.end(), p.sin_plane.begin(), p.sin_plane.end());
    out.values.insert(out.values.end(), p.magnitude.begin(), p.magnitude.end());
    return out;
}

namespace detail {

inline int direction_bin(float u, float v) {
    double deg = std::atan2(static_cast<double>(v), static_cast<double>(u)) * 180.0 /
                 3.14159265358979323846;
    if (deg < 0.0) deg += 360.0;
    int bin = static_cast<int>(deg / 30.0);
    return bin > 11 ? 11 : bin;
}

inline int folded_direction_bin(float u, float v) {
    // Drop the x-sign so leftward and rightward motion share bins; 12 bins
    // over the folded half circle.
    double deg = std::atan2(static_cast<double>(v), std::abs(static_cast<double>(u))) * 180.0 /
                 3.14159265358979323846; // in [-90, 90]
    int bin = static_cast<int>((deg + 90.0) / 15.0);
    return bin > 11 ? 11 : bin;
}

/// Histograms one cell over the surviving pixels.
template <typename Survives>
void cell_histogram(const FlowField& flow, const GridSpec::Cell& cell, bool magnitude_weighted,
                    bool folded, Survives survives, double* bins) {
    for (int b = 0; b < kDirectionBins; ++b) bins[b] = 0.0;
    for (int y = cell.y0; y < cell.y1; ++y)
        for (int x = cell.x0; x < cell.x1; ++x) {
            const FlowVec& f = flow.at(x, y);
            const double mag = f.magnitude();
            if (mag < kVoteMagnitudeFloor) continue;
            if (!survives(x, y)) continue;
            const int bin = folded ? folded_direction_bin(f.u, f.v) : direction_bin(f.u, f.v);
            bins[bin] += magnitude_weighted ? mag : 1.0;
        }
}

template <typename Survives>
FeatureVector grid_histogram(const FlowField& flow, const GridSpec& grid, DescriptorId id,
                             const DescriptorOptions& opts, bool normalize_cells,
                             Survives survives) {
    validate_flow(flow, to_string(id));
    const bool folded = opts.fold_hoof_bins && id == DescriptorId::hoof;
    FeatureVector out;
    out.id = id;
    out.values.assign(static_cast<size_t>(grid.cell_count()) * kDirectionBins, 0.0);
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c) {
            double* bins = out.values.data() +
                          (static_cast<size_t>(r) * grid.cols + c) * kDirectionBins;
            cell_histogram(flow, grid.cell(r, c, flow.width, flow.height),
                           opts.magnitude_weighted, folded, survives, bins);
            if (normalize_cells) {
                double sum = 0.0;
                for (int b = 0; b < kDirectionBins; ++b) sum += bins[b];
                if (sum > 0.0)
                    for (int b = 0; b < kDirectionBins; ++b) bins[b] /= sum;
            }
        }
    return out;
}

/// LMP survival mask: a pixel keeps its vote when at least kCoherenceFraction
/// of its in-bounds 8-neighbors move (mag >= floor) within
/// +-kCoherenceAngleDeg of its own direction.
inline std::vector<uint8_t> coherence_mask(const FlowField& flow) {
    const int w = flow.width, h = flow.height;
    std::vector<float> ang(static_cast<size_t>(w) * h);
    std::vector<uint8_t> moving(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const FlowVec& f = flow.at(x, y);
            const size_t i = static_cast<size_t>(y) * w + x;
            moving[i] = f.magnitude() >= kVoteMagnitudeFloor;
            ang[i] = static_cast<float>(std::atan2(static_cast<double>(f.v),
                                                   static_cast<double>(f.u)) *
                                        180.0 / 3.14159265358979323846);
        }
    std::vector<uint8_t> keep(static_cast<size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            if (!moving[i]) continue;
            int neighbors = 0, aligned = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    ++neighbors;
                    const size_t j = static_cast<size_t>(ny) * w + nx;
                    if (!moving[j]) continue;
                    float d = std::abs(ang[j] - ang[i]);
                    if (d > 180.0f) d = 360.0f - d;
                    if (d <= kCoherenceAngleDeg) ++aligned;
                }
            keep[i] = neighbors > 0 && aligned >= kCoherenceFraction * neighbors;
        }
    return keep;
}

} // namespace detail

/// Magnitude-weighted 12-direction histogram per grid cell.
inline FeatureVector hof_descriptor(const FlowField& flow, const GridSpec& grid = {},
                                    const DescriptorOptions& opts = {}) {
    return detail::grid_histogram(flow, grid, DescriptorId::hof, opts, false,
                                  [](int, int) { return true; });
}

/// HOF with per-cell L1 normalization (all-zero cells stay zero).
inline FeatureVector hoof_descriptor(const FlowField& flow, const GridSpec& grid = {},
                                     const DescriptorOptions& opts = {}) {
    return detail::grid_histogram(flow, grid, DescriptorId::hoof, opts, true,
                                  [](int, int) { return true; });
}

/// Coherence-filtered, per-cell normalized histogram (LMP-style: a one-step
/// propagation-coherence filter stands in for the full iterative model).
inline FeatureVector lmp_descriptor(const FlowField& flow, const GridSpec& grid = {},
                                    const DescriptorOptions& opts = {}) {
    const std::vector<uint8_t> keep = detail::coherence_mask(flow);
    return detail::grid_histogram(flow, grid, DescriptorId::lmp, opts, true,
                                  [&](int x, int y) {
                                      return keep[static_cast<size_t>(y) * flow.width + x] != 0;
                                  });
}

inline FeatureVector compute_descriptor(DescriptorId id, const FlowField& flow,
                                        const GridSpec& grid = {},
                                        const DescriptorOptions& opts = {}) {
    switch (id) {
        case DescriptorId::raw: return raw_flow_vector(flow);
        case DescriptorId::hof: return hof_descriptor(flow, grid, opts);
        case DescriptorId::hoof: return hoof_descriptor(flow, grid, opts);
        case DescriptorId::lmp: return lmp_descriptor(flow, grid, opts);
    }
    throw InvalidInput("compute_descriptor: bad descriptor id");
}

/// Element-wise sum of per-pair descriptors into one temporal vector.
inline FeatureVector temporal_aggregate(std::span<const FeatureVector> parts) {
    if (parts.empty()) throw InvalidInput("temporal_aggregate: needs at least one descriptor");
    for (const FeatureVector& p : parts)
        if (p.id != parts.front().id || p.values.size() != parts.front().values.size())
            throw InvalidInput("temporal_aggregate: mixed descriptor kinds or lengths");
    FeatureVector out;
    out.id = parts.front().id;
    out.values.resize(parts.front().values.size());
    for (size_t i = 0; i < out.values.size(); ++i) {
        double acc = 0.0;
        for (const FeatureVector& p : parts) acc += p.values[i];
        out.values[i] = acc;
    }
    return out;
}

} // namespace flowbench::descriptors
