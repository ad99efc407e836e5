#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "flowbench/core/png_io.hpp"
#include "flowbench/preprocess/landmarks.hpp"
#include "flowbench/preprocess/motion.hpp"
#include "flowbench/preprocess/standardize.hpp"

namespace flowbench::harness {

/// Standardizes raw frames + landmarks into a SequenceRecord.
inline preprocess::SequenceRecord standardize_sequence(
    const std::string& id, const std::vector<GrayImage>& frames,
    const std::vector<preprocess::LandmarkSet>& landmarks, preprocess::ExpressionLabel label) {
    if (frames.size() != landmarks.size())
        throw InvalidInput("standardize_sequence: frame/landmark count mismatch for " + id);
    preprocess::SequenceRecord rec;
    rec.id = id;
    rec.label = label;
    for (size_t t = 0; t < frames.size(); ++t) {
        preprocess::StandardizedFace face = preprocess::standardize_face(frames[t], landmarks[t]);
        rec.frames.push_back(std::move(face.image));
        rec.landmarks.push_back(std::move(face.landmarks));
    }
    return rec;
}

struct IngestResult {
    std::vector<preprocess::SequenceRecord> records;
    struct Skip {
        std::string id;
        std::string reason;
    };
    std::vector<Skip> skipped;
};

/// Dataset layout: root/<sequence_id>/frame_0001.png... + landmarks.json +
/// label.txt. Sequences with problems are skipped with a recorded reason;
/// ordering is lexicographic by sequence id. Directories starting with '_'
/// (e.g. emitted ground-truth flows) are ignored.
inline IngestResult ingest_dataset(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root))
        throw ProtocolError("ingest_dataset: '" + root.string() + "' is not a directory");

    std::vector<fs::path> seq_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && !entry.path().filename().string().starts_with("_"))
            seq_dirs.push_back(entry.path());
    if (seq_dirs.empty())
        throw ProtocolError("ingest_dataset: no sequence directories under " + root.string());
    std::sort(seq_dirs.begin(), seq_dirs.end());

    IngestResult out;
    for (const fs::path& dir : seq_dirs) {
        const std::string id = dir.filename().string();
        try {
            std::vector<fs::path> frame_files;
            for (const auto& entry : fs::directory_iterator(dir)) {
                const std::string name = entry.path().filename().string();
                if (name.starts_with("frame_") && name.ends_with(".png"))
                    frame_files.push_back(entry.path());
            }
            std::sort(frame_files.begin(), frame_files.end());
            if (frame_files.size() < 2) {
                out.skipped.push_back({id, "too short (" + std::to_string(frame_files.size()) +
                                               " frame(s))"});
                continue;
            }
            if (!fs::exists(dir / "landmarks.json")) {
                out.skipped.push_back({id, "missing landmarks.json"});
                continue;
            }
            std::ifstream label_in(dir / "label.txt");
            if (!label_in) {
                out.skipped.push_back({id, "missing label.txt"});
                continue;
            }
            std::string label_text;
            std::getline(label_in, label_text);
            while (!label_text.empty() &&
                   (label_text.back() == '\r' || label_text.back() == ' '))
                label_text.pop_back();

            const preprocess::ExpressionLabel label = preprocess::parse_expression_label(label_text);
            const std::vector<preprocess::LandmarkSet> landmarks =
                preprocess::read_landmarks_json(dir / "landmarks.json");
            if (landmarks.size() != frame_files.size()) {
                out.skipped.push_back({id, "landmark count " + std::to_string(landmarks.size()) +
                                               " != frame count " +
                                               std::to_string(frame_files.size())});
                continue;
            }
            std::vector<GrayImage> frames;
            frames.reserve(frame_files.size());
            for (const fs::path& f : frame_files) frames.push_back(read_png_gray(f));
            out.records.push_back(standardize_sequence(id, frames, landmarks, label));
        } catch (const std::exception& e) {
            out.skipped.push_back({id, e.what()});
        }
    }
    return out;
}

} // namespace flowbench::harness
