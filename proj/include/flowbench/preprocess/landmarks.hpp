#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "flowbench/error.hpp"

namespace flowbench::preprocess {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// The standard 68-point annotation: contour 0-16, brows 17-26, nose 27-35,
/// eyes 36-47, mouth 48-67.
struct LandmarkSet {
    std::vector<Point2> points;

    LandmarkSet() = default;
    explicit LandmarkSet(std::vector<Point2> pts) : points(std::move(pts)) {
        if (points.size() != 68)
            throw InvalidInput("LandmarkSet: expected 68 points, got " +
                               std::to_string(points.size()));
    }

    const Point2& operator[](size_t i) const { return points[i]; }
    Point2& operator[](size_t i) { return points[i]; }

    Point2 mean_of(int first, int last) const { // inclusive range
        Point2 c;
        for (int i = first; i <= last; ++i) {
            c.x += points[i].x;
            c.y += points[i].y;
        }
        const double n = last - first + 1;
        c.x /= n;
        c.y /= n;
        return c;
    }
};

inline constexpr int kContourFirst = 0, kContourLast = 16;
inline constexpr int kBrowsFirst = 17, kBrowsLast = 26;
inline constexpr int kNoseFirst = 27, kNoseLast = 35;
inline constexpr int kLeftEyeFirst = 36, kLeftEyeLast = 41;
inline constexpr int kRightEyeFirst = 42, kRightEyeLast = 47;
inline constexpr int kEyesFirst = 36, kEyesLast = 47;
inline constexpr int kMouthFirst = 48, kMouthLast = 67;

/// Procedural mean-face layout in a unit box, scaled into (w x h) with a
/// uniform margin. Used by the synthetic generator and as a test fixture.
inline LandmarkSet canonical_landmarks(int w, int h, double margin = 0.10) {
    std::vector<Point2> pts(68);
    auto put = [&](int i, double ux, double uy) {
        pts[i] = {margin * w + ux * (1.0 - 2.0 * margin) * w,
                  margin * h + uy * (1.0 - 2.0 * margin) * h};
    };
    const double pi = 3.14159265358979323846;
    for (int i = 0; i <= 16; ++i) { // jaw line, left ear to right ear through the chin
        const double t = i / 16.0;
        const double phi = pi * (1.0 - t);
        put(i, 0.5 + 0.46 * std::cos(phi), 0.32 + 0.55 * std::sin(phi));
    }
    for (int i = 0; i < 5; ++i) { // brows with a slight arch
        const double t = i / 4.0;
        put(17 + i, 0.17 + 0.26 * t, 0.24 - 0.035 * std::sin(pi * t));
        put(22 + i, 0.57 + 0.26 * t, 0.24 - 0.035 * std::sin(pi * t));
    }
    for (int i = 0; i < 4; ++i) put(27 + i, 0.5, 0.33 + 0.06 * i); // nose bridge
    for (int i = 0; i < 5; ++i) put(31 + i, 0.42 + 0.04 * i, 0.56 + 0.015 * (2.0 - std::abs(i - 2.0)));
    auto eye = [&](int first, double cx) { // corner-top-top-corner-bottom-bottom hexagon
        static const double ang[6] = {180.0, 120.0, 60.0, 0.0, -60.0, -120.0};
        for (int i = 0; i < 6; ++i) {
            const double a = ang[i] * pi / 180.0;
            put(first + i, cx + 0.065 * std::cos(a), 0.33 - 0.028 * std::sin(a));
        }
    };
    eye(36, 0.30);
    eye(42, 0.70);
    for (int i = 0; i < 12; ++i) { // outer lip, left corner counter-clockwise
        const double a = (180.0 - 30.0 * i) * pi / 180.0;
        put(48 + i, 0.5 + 0.145 * std::cos(a), 0.74 - 0.055 * std::sin(a));
    }
    for (int i = 0; i < 8; ++i) { // inner lip
        const double a = (180.0 - 45.0 * i) * pi / 180.0;
        put(60 + i, 0.5 + 0.095 * std::cos(a), 0.74 - 0.022 * std::sin(a));
    }
    return LandmarkSet(std::move(pts));
}

/// landmarks.json: array (one entry per frame) of 68 [x, y] pairs.
inline std::vector<LandmarkSet> read_landmarks_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("read_landmarks: cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("read_landmarks: " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw FormatError("read_landmarks: top level must be an array");
    std::vector<LandmarkSet> out;
    out.reserve(doc.size());
    for (const auto& frame : doc) {
        if (!frame.is_array() || frame.size() != 68)
            throw FormatError("read_landmarks: each frame needs exactly 68 points");
        std::vector<Point2> pts(68);
        for (size_t i = 0; i < 68; ++i) {
            const auto& p = frame[i];
            if (!p.is_array() || p.size() != 2)
                throw FormatError("read_landmarks: point must be an [x, y] pair");
            pts[i] = {p[0].get<double>(), p[1].get<double>()};
            if (!std::isfinite(pts[i].x) || !std::isfinite(pts[i].y))
                throw FormatError("read_landmarks: non-finite coordinate");
        }
        out.emplace_back(std::move(pts));
    }
    return out;
}

inline void write_landmarks_json(const std::vector<LandmarkSet>& frames,
                                 const std::filesystem::path& path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const LandmarkSet& lm : frames) {
        nlohmann::json f = nlohmann::json::array();
        for (const Point2& p : lm.points) f.push_back({p.x, p.y});
        doc.push_back(std::move(f));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("write_landmarks: cannot open " + path.string());
    out << doc.dump() << "\n";
}

} // namespace flowbench::preprocess
