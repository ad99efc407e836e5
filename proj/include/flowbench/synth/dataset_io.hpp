#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "flowbench/core/flow_io.hpp"
#include "flowbench/core/png_io.hpp"
#include "flowbench/synth/generate.hpp"

namespace flowbench::synth {

/// Writes the harness dataset layout:
///   root/<sequence_id>/frame_0001.png ... , landmarks.json, label.txt
/// and, when asked, the raw-scale ground-truth pair flows under
/// root/_gt_flows/<sequence_id>/<i>_<j>.flo.
inline void write_dataset(const ExpressionDataset& dataset, const std::filesystem::path& root,
                          bool emit_gt_flows = false) {
    namespace fs = std::filesystem;
    fs::create_directories(root);
    for (const RawSequence& seq : dataset.sequences) {
        const fs::path dir = root / seq.id;
        fs::create_directories(dir);
        for (size_t t = 0; t < seq.frames.size(); ++t) {
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%04zu.png", t + 1);
            write_png_gray(seq.frames[t], dir / name);
        }
        preprocess::write_landmarks_json(seq.landmarks, dir / "landmarks.json");
        std::ofstream label(dir / "label.txt", std::ios::trunc);
        label << preprocess::to_string(seq.label) << "\n";
    }
    if (emit_gt_flows) {
        for (const auto& [id, flows] : dataset.gt_pair_flows) {
            const fs::path dir = root / "_gt_flows" / id;
            fs::create_directories(dir);
            for (size_t t = 0; t < flows.size(); ++t) {
                char name[32];
                std::snprintf(name, sizeof(name), "%04zu_%04zu.flo", t, t + 1);
                write_flo(flows[t], dir / name);
            }
        }
    }
}

} // namespace flowbench::synth
