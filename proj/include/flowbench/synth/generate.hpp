#pragma once

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/image.hpp"
#include "flowbench/core/rng.hpp"
#include "flowbench/core/warp.hpp"
#include "flowbench/preprocess/landmarks.hpp"
#include "flowbench/preprocess/motion.hpp"
#include "flowbench/synth/noise.hpp"

namespace flowbench::synth {

enum class MotionKind { translation, rotation, radial, discontinuity };

inline std::string to_string(MotionKind k) {
    switch (k) {
        case MotionKind::translation: return "translation";
        case MotionKind::rotation: return "rotation";
        case MotionKind::radial: return "radial";
        case MotionKind::discontinuity: return "discontinuity";
    }
    return {};
}

/// Analytic motion on fractal-noise texture. Parameter meaning by kind:
/// translation (dx = param_a, dy = param_b); rotation (param_a degrees about
/// the center); radial (rate param_a per pixel of radius); discontinuity
/// (+-param_a px across a vertical center seam).
struct SynthSpec {
    MotionKind kind = MotionKind::translation;
    double param_a = 2.0;
    double param_b = 0.0;
    uint64_t texture_seed = 1;
    int width = 64;
    int height = 64;
};

struct SynthPair {
    GrayImage prev;
    GrayImage next;
    FlowField gt;
};

/// Displacements beyond this (scaled from 8 px at 64x64) leave the
/// well-posed estimation range.
inline double max_wellposed_magnitude(int w, int h) {
    return 8.0 * std::min(w, h) / 64.0;
}

inline FlowField analytic_flow(const SynthSpec& spec) {
    const int w = spec.width, h = spec.height;
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    FlowField gt(w, h);
    switch (spec.kind) {
        case MotionKind::translation:
            for (auto& v : gt.vectors)
                v = {static_cast<float>(spec.param_a), static_cast<float>(spec.param_b)};
            break;
        case MotionKind::rotation: {
            const double a = spec.param_a * 3.14159265358979323846 / 180.0;
            const double ca = std::cos(a), sa = std::sin(a);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double dx = x - cx, dy = y - cy;
                    gt.at(x, y) = {static_cast<float>(ca * dx + sa * dy - dx),
                                   static_cast<float>(-sa * dx + ca * dy - dy)};
                }
            break;
        }
        case MotionKind::radial:
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    gt.at(x, y) = {static_cast<float>(spec.param_a * (x - cx)),
                                   static_cast<float>(spec.param_a * (y - cy))};
            break;
        case MotionKind::discontinuity:
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    gt.at(x, y) = {static_cast<float>(x < w / 2 ? spec.param_a : -spec.param_a),
                                   0.0f};
            break;
    }
    return gt;
}

/// prev = seeded fractal noise; gt analytic; next = warp_image(prev, gt),
/// so the same bilinear kernel defines the pair and its ground truth.
inline SynthPair generate_pair(const SynthSpec& spec) {
    if (spec.width < 8 || spec.height < 8)
        throw InvalidInput("generate_pair: raster must be at least 8x8");
    SynthPair pair;
    pair.gt = analytic_flow(spec);
    const double bound = max_wellposed_magnitude(spec.width, spec.height);
    for (const FlowVec& v : pair.gt.vectors)
        if (v.magnitude() > bound)
            throw InvalidInput("generate_pair: displacement " + std::to_string(v.magnitude()) +
                               " px exceeds the well-posed bound " + std::to_string(bound));
    pair.prev = fractal_noise(spec.width, spec.height, spec.texture_seed);
    pair.next = warp_image(pair.prev, pair.gt);
    return pair;
}

// ---------------------------------------------------------------------------
// Expression-like sequences: class-specific motion templates anchored at the
// canonical landmarks, ramped neutral -> apex.

struct ExpressionDatasetSpec {
    int classes = 6; // uses the first `classes` of the six labels
    int sequences_per_class = 4;
    int frames_per_sequence = 12;
    uint64_t seed = 1;
    int width = 64;
    int height = 64;
    double frame_noise_sigma = 0.004;
};

/// A sequence before face standardization (original-coordinate frames).
struct RawSequence {
    std::string id;
    std::vector<GrayImage> frames;
    std::vector<preprocess::LandmarkSet> landmarks;
    preprocess::ExpressionLabel label = preprocess::ExpressionLabel::anger;
};

struct ExpressionDataset {
    std::vector<RawSequence> sequences;
    // Consecutive-pair ground truth per sequence id, original-frame scale.
    std::map<std::string, std::vector<FlowField>> gt_pair_flows;
};

namespace detail {

struct MotionBlob {
    preprocess::Point2 center;
    double dir_x, dir_y; // unit direction
    double magnitude;    // apex displacement, px at 64x64
};

/// Fixed per-class templates over the canonical face geometry. Each class
/// concentrates motion in distinct dynamic regions/directions so the desk
/// benchmark stays separable.
inline std::vector<MotionBlob> class_template(preprocess::ExpressionLabel label,
                                              const preprocess::LandmarkSet& lm) {
    using preprocess::ExpressionLabel;
    const preprocess::Point2 mouth_l = lm[48], mouth_r = lm[54];
    const preprocess::Point2 lip_top = lm[51], lip_bottom = lm[57];
    const preprocess::Point2 brow_l = lm.mean_of(17, 21), brow_r = lm.mean_of(22, 26);
    const preprocess::Point2 nose_tip = lm[33];
    switch (label) {
        case ExpressionLabel::happiness: // mouth corners diverge up and outward
            return {{mouth_l, -0.8, -0.6, 2.2}, {mouth_r, 0.8, -0.6, 2.2}};
        case ExpressionLabel::surprise: // brows rise, jaw drops
            return {{brow_l, 0.0, -1.0, 2.0}, {brow_r, 0.0, -1.0, 2.0}, {lip_bottom, 0.0, 1.0, 2.2}};
        case ExpressionLabel::anger: // brows clamp down and inward
            return {{brow_l, 0.5, 0.87, 2.0}, {brow_r, -0.5, 0.87, 2.0}};
        case ExpressionLabel::disgust: // upper lip and nose wing raise
            return {{lip_top, 0.0, -1.0, 2.2}, {nose_tip, 0.0, -1.0, 1.4}};
        case ExpressionLabel::sadness: // mouth corners sink
            return {{mouth_l, -0.3, 0.95, 2.0}, {mouth_r, 0.3, 0.95, 2.0}};
        case ExpressionLabel::fear: // mouth stretches sideways, brows lift a little
            return {{mouth_l, -1.0, 0.0, 2.2}, {mouth_r, 1.0, 0.0, 2.2},
                    {brow_l, 0.0, -1.0, 0.9}, {brow_r, 0.0, -1.0, 0.9}};
    }
    return {};
}

inline FlowField template_flow(const std::vector<MotionBlob>& blobs, int w, int h,
                               double mag_scale, double dir_rotation_rad) {
    const double sigma = w / 10.0;
    const double ca = std::cos(dir_rotation_rad), sa = std::sin(dir_rotation_rad);
    FlowField f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double u = 0.0, v = 0.0;
            for (const MotionBlob& b : blobs) {
                const double dx = x - b.center.x, dy = y - b.center.y;
                const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                const double du = b.dir_x * ca - b.dir_y * sa;
                const double dv = b.dir_x * sa + b.dir_y * ca;
                u += b.magnitude * mag_scale * g * du;
                v += b.magnitude * mag_scale * g * dv;
            }
            f.at(x, y) = {static_cast<float>(u), static_cast<float>(v)};
        }
    return f;
}

} // namespace detail

/// Deterministic per seed. Frames are chained warps of the neutral texture
/// (so consecutive-pair ground truth is exact) with per-frame additive noise
/// on the emitted copies only. The activation ramp is quadratic: the first
/// pair carries almost no motion, the apex pair the most.
inline ExpressionDataset generate_expression_dataset(const ExpressionDatasetSpec& spec) {
    using preprocess::ExpressionLabel;
    if (spec.classes < 1 || spec.classes > preprocess::kExpressionClassCount)
        throw InvalidInput("generate_expression_dataset: classes must lie in 1..6");
    if (spec.sequences_per_class < 1)
        throw InvalidInput("generate_expression_dataset: sequences_per_class must be >= 1");
    if (spec.frames_per_sequence < 10)
        throw InvalidInput("generate_expression_dataset: frames_per_sequence must be >= 10");

    const preprocess::LandmarkSet lm = preprocess::canonical_landmarks(spec.width, spec.height);
    ExpressionDataset out;
    for (int c = 0; c < spec.classes; ++c) {
        const auto label = static_cast<ExpressionLabel>(c);
        const std::vector<detail::MotionBlob> blobs = detail::class_template(label, lm);
        for (int s = 0; s < spec.sequences_per_class; ++s) {
            const uint64_t seq_seed =
                derive_seed(spec.seed, static_cast<uint64_t>(c) * 1000 + s);
            std::mt19937_64 rng(seq_seed);
            std::uniform_real_distribution<double> mag_jitter(0.85, 1.15);
            std::uniform_real_distribution<double> dir_jitter(-0.1745, 0.1745); // +-10 degrees
            std::normal_distribution<double> pixel_noise(0.0, spec.frame_noise_sigma);

            const double mag_scale = mag_jitter(rng) * std::min(spec.width, spec.height) / 64.0;
            const FlowField tmpl = detail::template_flow(blobs, spec.width, spec.height,
                                                         mag_scale, dir_jitter(rng));

            char id[64];
            std::snprintf(id, sizeof(id), "%s_%03d", preprocess::to_string(label).c_str(), s);
            RawSequence seq;
            seq.id = id;
            seq.label = label;

            const int T = spec.frames_per_sequence;
            std::vector<FlowField>& gts = out.gt_pair_flows[seq.id];
            GrayImage clean = fractal_noise(spec.width, spec.height, derive_seed(seq_seed, 77));
            auto ramp = [&](int t) {
                const double r = static_cast<double>(t) / (T - 1);
                return r * r;
            };
            for (int t = 0; t < T; ++t) {
                if (t > 0) {
                    const double step = ramp(t) - ramp(t - 1);
                    FlowField gt(spec.width, spec.height);
                    for (size_t i = 0; i < gt.pixel_count(); ++i)
                        gt.vectors[i] = {static_cast<float>(tmpl.vectors[i].u * step),
                                         static_cast<float>(tmpl.vectors[i].v * step)};
                    clean = warp_image(clean, gt);
                    gts.push_back(std::move(gt));
                }
                GrayImage noisy = clean;
                for (float& v : noisy.data) {
                    const double n = v + pixel_noise(rng);
                    v = static_cast<float>(n < 0.0 ? 0.0 : (n > 1.0 ? 1.0 : n));
                }
                seq.frames.push_back(std::move(noisy));
                seq.landmarks.push_back(lm);
            }
            out.sequences.push_back(std::move(seq));
        }
    }
    return out;
}

} // namespace flowbench::synth
