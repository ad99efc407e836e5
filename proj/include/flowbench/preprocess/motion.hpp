#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/image.hpp"
#include "flowbench/preprocess/landmarks.hpp"
#include "flowbench/preprocess/regions.hpp"

namespace flowbench::preprocess {

enum class ExpressionLabel { anger, disgust, fear, happiness, sadness, surprise };

inline constexpr int kExpressionClassCount = 6;

inline std::string to_string(ExpressionLabel l) {
    switch (l) {
        case ExpressionLabel::anger: return "anger";
        case ExpressionLabel::disgust: return "disgust";
        case ExpressionLabel::fear: return "fear";
        case ExpressionLabel::happiness: return "happiness";
        case ExpressionLabel::sadness: return "sadness";
        case ExpressionLabel::surprise: return "surprise";
    }
    return {};
}

inline ExpressionLabel parse_expression_label(const std::string& s) {
    if (s == "anger") return ExpressionLabel::anger;
    if (s == "disgust") return ExpressionLabel::disgust;
    if (s == "fear") return ExpressionLabel::fear;
    if (s == "happiness") return ExpressionLabel::happiness;
    if (s == "sadness") return ExpressionLabel::sadness;
    if (s == "surprise") return ExpressionLabel::surprise;
    throw InvalidInput("unknown expression label '" + s + "'");
}

/// A standardized neutral-to-apex sequence.
struct SequenceRecord {
    std::string id;
    std::vector<GrayImage> frames;       // 50x50 standardized
    std::vector<LandmarkSet> landmarks;  // one set per frame, 50x50 coordinates
    ExpressionLabel label = ExpressionLabel::anger;

    int frame_count() const { return static_cast<int>(frames.size()); }
};

inline void validate_sequence(const SequenceRecord& seq) {
    if (seq.frames.size() < 2)
        throw InvalidInput("SequenceRecord " + seq.id + ": needs at least 2 frames");
    if (seq.frames.size() != seq.landmarks.size())
        throw InvalidInput("SequenceRecord " + seq.id + ": frame/landmark count mismatch");
}

struct MotionScore {
    double value = 0.0;
};

/// Division floor for the rigid-region intensity; keeps the score finite
/// when the head is perfectly still.
inline constexpr double kRigidMotionFloor = 1e-4;

/// Dynamic-over-rigid motion ratio between two frames:
/// (mean|flow| over E + mean|flow| over M) / mean|flow| over H,
/// zero when the dynamic regions carry no motion.
inline MotionScore intraface_motion_score(const FlowField& flow, const RegionPartition& part) {
    if (flow.width != part.width || flow.height != part.height)
        throw InvalidInput("intraface_motion_score: flow/partition dimension mismatch");
    using R = RegionPartition::Region;
    double sum_e = 0.0, sum_m = 0.0, sum_h = 0.0;
    size_t n_e = 0, n_m = 0, n_h = 0;
    for (int y = 0; y < flow.height; ++y)
        for (int x = 0; x < flow.width; ++x) {
            const double mag = flow.at(x, y).magnitude();
            switch (part.at(x, y)) {
                case R::dynamic_eyes: sum_e += mag; ++n_e; break;
                case R::dynamic_mouth: sum_m += mag; ++n_m; break;
                case R::rigid_head: sum_h += mag; ++n_h; break;
                case R::none: break;
            }
        }
    const double delta_e = n_e ? sum_e / static_cast<double>(n_e) : 0.0;
    const double delta_m = n_m ? sum_m / static_cast<double>(n_m) : 0.0;
    const double delta_h = n_h ? sum_h / static_cast<double>(n_h) : 0.0;
    if (delta_e + delta_m <= 0.0) return {0.0};
    return {(delta_e + delta_m) / std::max(delta_h, kRigidMotionFloor)};
}

/// Scores every consecutive pair; pair t uses frame t's landmarks.
inline std::vector<double> pairwise_motion_scores(const SequenceRecord& seq,
                                                  const std::vector<FlowField>& flows) {
    validate_sequence(seq);
    if (flows.size() + 1 != seq.frames.size())
        throw InvalidInput("pairwise_motion_scores: need one flow per consecutive frame pair");
    std::vector<double> scores(flows.size());
    for (size_t t = 0; t < flows.size(); ++t) {
        const RegionPartition part =
            region_partition(seq.landmarks[t], seq.frames[t].width, seq.frames[t].height);
        scores[t] = intraface_motion_score(flows[t], part).value;
    }
    return scores;
}

/// Picks n key frames: endpoints always, interior frames ranked by the
/// largest change |f_t - f_{t-1}| of the pairwise score, earlier index on
/// ties. Returns strictly increasing indices.
inline std::vector<int> select_key_images(int frame_count, const std::vector<double>& scores,
                                          int n) {
    if (n < 2) throw InvalidInput("select_key_images: n must be >= 2");
    if (static_cast<int>(scores.size()) + 1 != frame_count)
        throw InvalidInput("select_key_images: need one score per consecutive frame pair");
    if (frame_count < n)
        throw ProtocolError("select_key_images: sequence has " + std::to_string(frame_count) +
                            " frames, needs at least " + std::to_string(n));

    std::vector<int> picked = {0, frame_count - 1};
    std::vector<std::pair<double, int>> ranked; // (-delta, index) for ascending sort
    for (int t = 1; t <= frame_count - 2; ++t)
        ranked.emplace_back(-std::abs(scores[t] - scores[t - 1]), t);
    std::sort(ranked.begin(), ranked.end());
    for (int k = 0; k < n - 2; ++k) picked.push_back(ranked[k].second);
    std::sort(picked.begin(), picked.end());
    return picked;
}

inline std::vector<int> select_key_images(const SequenceRecord& seq,
                                          const std::vector<FlowField>& flows, int n) {
    return select_key_images(seq.frame_count(), pairwise_motion_scores(seq, flows), n);
}

enum class TimMode { tim2, tim10 };

inline std::string to_string(TimMode m) { return m == TimMode::tim2 ? "TIM2" : "TIM10"; }

inline TimMode parse_tim_mode(const std::string& s) {
    if (s == "TIM2" || s == "tim2") return TimMode::tim2;
    if (s == "TIM10" || s == "tim10") return TimMode::tim10;
    throw InvalidInput("unknown TIM mode '" + s + "'");
}

inline std::vector<int> tim_key_indices(const SequenceRecord& seq, TimMode mode,
                                        const std::vector<FlowField>& consecutive_flows) {
    validate_sequence(seq);
    if (mode == TimMode::tim2) return {0, seq.frame_count() - 1};
    if (seq.frame_count() < 10)
        throw ProtocolError("tim_normalize: TIM10 needs at least 10 frames, sequence " + seq.id +
                            " has " + std::to_string(seq.frame_count()));
    return select_key_images(seq, consecutive_flows, 10);
}

/// Keeps {first, last} (TIM2) or the 10 key frames (TIM10).
inline SequenceRecord tim_normalize(const SequenceRecord& seq, TimMode mode,
                                    const std::vector<FlowField>& consecutive_flows = {}) {
    const std::vector<int> keep = tim_key_indices(seq, mode, consecutive_flows);
    SequenceRecord out;
    out.id = seq.id;
    out.label = seq.label;
    for (int idx : keep) {
        out.frames.push_back(seq.frames[idx]);
        out.landmarks.push_back(seq.landmarks[idx]);
    }
    return out;
}

} // namespace flowbench::preprocess
