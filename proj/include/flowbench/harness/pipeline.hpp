#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowbench/descriptors/descriptors.hpp"
#include "flowbench/engines/external.hpp"
#include "flowbench/engines/farneback.hpp"
#include "flowbench/engines/patchmatch.hpp"
#include "flowbench/engines/tvl1.hpp"
#include "flowbench/harness/cache.hpp"
#include "flowbench/harness/config.hpp"
#include "flowbench/harness/parallel.hpp"
#include "flowbench/preprocess/motion.hpp"

namespace flowbench::harness {

inline FlowField compute_native_flow(const engines::EngineId& id, const GrayImage& prev,
                                     const GrayImage& next, const EngineParams& params) {
    switch (id.kind) {
        case engines::EngineId::Kind::farneback:
            return engines::farneback_flow(prev, next, params.farneback);
        case engines::EngineId::Kind::tvl1: return engines::tvl1_flow(prev, next, params.tvl1);
        case engines::EngineId::Kind::patchmatch:
            return engines::patchmatch_flow(prev, next, params.patchmatch);
        case engines::EngineId::Kind::external:
            throw InvalidInput("compute_native_flow: external engines read files");
    }
    throw InvalidInput("compute_native_flow: bad engine id");
}

/// Flows selected for one sequence under a TIM mode: TIM2 yields the single
/// (neutral, apex) flow; TIM10 yields the nine key-pair flows.
struct SequenceFlows {
    std::vector<int> key_indices;
    std::vector<FlowField> flows; // one per consecutive key pair
};

namespace detail {

inline FlowField pair_flow(const preprocess::SequenceRecord& seq, int i, int j,
                           const engines::EngineId& engine, const EngineParams& params,
                           const std::filesystem::path& external_root, const FlowCache& cache,
                           const std::string& params_hash) {
    if (engine.kind == engines::EngineId::Kind::external) {
        const std::filesystem::path path =
            external_root / engine.name() / seq.id / (pair_stem(i, j) + ".flo");
        if (!std::filesystem::exists(path))
            throw ProtocolError("external flow missing: " + path.string());
        return engines::import_external_flow(path, seq.frames[i].width, seq.frames[i].height);
    }
    return cache.get_or_compute(engine.name(), params_hash, seq.id, i, j, [&] {
        return compute_native_flow(engine, seq.frames[i], seq.frames[j], params);
    });
}

} // namespace detail

/// TIM2: one (first, last) flow. TIM10: all consecutive flows feed the
/// key-image scoring, then the key-pair flows are computed (or, with
/// sum_consecutive, summed from the consecutive flows between keys).
inline SequenceFlows compute_sequence_flows(const preprocess::SequenceRecord& seq,
                                            const engines::EngineId& engine,
                                            const EngineParams& params,
                                            preprocess::TimMode tim_mode, const FlowCache& cache,
                                            const std::filesystem::path& external_root = {},
                                            bool tim10_sum_consecutive = false) {
    preprocess::validate_sequence(seq);
    const std::string params_hash = fnv1a_hex(engine_param_string(engine, params));
    const int last = seq.frame_count() - 1;

    SequenceFlows out;
    if (tim_mode == preprocess::TimMode::tim2) {
        out.key_indices = {0, last};
        out.flows.push_back(
            detail::pair_flow(seq, 0, last, engine, params, external_root, cache, params_hash));
        return out;
    }

    std::vector<FlowField> consecutive(static_cast<size_t>(seq.frame_count() - 1));
    for (int t = 0; t < seq.frame_count() - 1; ++t)
        consecutive[t] =
            detail::pair_flow(seq, t, t + 1, engine, params, external_root, cache, params_hash);
    out.key_indices = preprocess::tim_key_indices(seq, preprocess::TimMode::tim10, consecutive);

    for (size_t k = 0; k + 1 < out.key_indices.size(); ++k) {
        const int i = out.key_indices[k], j = out.key_indices[k + 1];
        if (tim10_sum_consecutive) {
            FlowField sum(seq.frames[i].width, seq.frames[i].height);
            for (int t = i; t < j; ++t)
                for (size_t p = 0; p < sum.pixel_count(); ++p) {
                    sum.vectors[p].u += consecutive[t].vectors[p].u;
                    sum.vectors[p].v += consecutive[t].vectors[p].v;
                }
            out.flows.push_back(std::move(sum));
        } else if (j == i + 1) {
            out.flows.push_back(consecutive[i]);
        } else {
            out.flows.push_back(
                detail::pair_flow(seq, i, j, engine, params, external_root, cache, params_hash));
        }
    }
    return out;
}

/// Per-sequence classifier input: the descriptor of the TIM2 flow, or the
/// temporal aggregate over the TIM10 key-pair flows.
inline descriptors::FeatureVector sequence_feature(const SequenceFlows& flows,
                                                   descriptors::DescriptorId descriptor,
                                                   const descriptors::DescriptorOptions& opts) {
    std::vector<descriptors::FeatureVector> parts;
    parts.reserve(flows.flows.size());
    for (const FlowField& f : flows.flows)
        parts.push_back(descriptors::compute_descriptor(descriptor, f, {}, opts));
    if (parts.size() == 1) return parts.front();
    return descriptors::temporal_aggregate(parts);
}

/// Computes flows for every record (parallel over sequences, outputs in
/// record order).
inline std::vector<SequenceFlows> compute_flows(const std::vector<preprocess::SequenceRecord>& records,
                                                const engines::EngineId& engine,
                                                const EngineParams& params,
                                                preprocess::TimMode tim_mode, const FlowCache& cache,
                                                int jobs,
                                                const std::filesystem::path& external_root = {},
                                                bool tim10_sum_consecutive = false) {
    std::vector<SequenceFlows> out(records.size());
    parallel_for(records.size(), jobs, [&](size_t i) {
        out[i] = compute_sequence_flows(records[i], engine, params, tim_mode, cache, external_root,
                                        tim10_sum_consecutive);
    });
    return out;
}

} // namespace flowbench::harness
