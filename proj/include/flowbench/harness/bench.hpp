#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "flowbench/core/metrics.hpp"
#include "flowbench/core/rng.hpp"
#include "flowbench/harness/parallel.hpp"
#include "flowbench/harness/pipeline.hpp"
#include "flowbench/synth/generate.hpp"

namespace flowbench::harness {

struct BenchOptions {
    int seeds_per_kind = 10;
    int size = 64;
    uint64_t master_seed = 7;
    int jobs = 1;
    int interior_border = 8;
    int seam_halfwidth = 3;
    bool include_gt_control = true;
};

struct BenchRow {
    std::string engine;
    std::string kind; // motion kind, or "<kind>_seam" for the seam band
    FlowErrorStats stats;
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

namespace detail {

inline synth::SynthSpec bench_spec(synth::MotionKind kind, uint64_t seed, int size) {
    synth::SynthSpec spec;
    spec.kind = kind;
    spec.texture_seed = derive_seed(seed, 0);
    spec.width = size;
    spec.height = size;
    switch (kind) {
        case synth::MotionKind::translation:
            spec.param_a = -3.0 + 6.0 * hash_unit(derive_seed(seed, 1));
            spec.param_b = -3.0 + 6.0 * hash_unit(derive_seed(seed, 2));
            break;
        case synth::MotionKind::rotation:
            spec.param_a = -4.0 + 8.0 * hash_unit(derive_seed(seed, 1));
            break;
        case synth::MotionKind::radial:
            spec.param_a = -0.04 + 0.08 * hash_unit(derive_seed(seed, 1));
            break;
        case synth::MotionKind::discontinuity:
            spec.param_a = 2.0;
            break;
    }
    return spec;
}

inline FlowErrorStats average_stats(const std::vector<FlowErrorStats>& all) {
    FlowErrorStats avg;
    for (const FlowErrorStats& s : all) {
        avg.mean_epe += s.mean_epe;
        avg.max_epe = std::max(avg.max_epe, s.max_epe);
        avg.mean_angular_error += s.mean_angular_error;
        avg.inlier_fraction_0_5px += s.inlier_fraction_0_5px;
    }
    const double n = static_cast<double>(all.size());
    avg.mean_epe /= n;
    avg.mean_angular_error /= n;
    avg.inlier_fraction_0_5px /= n;
    return avg;
}

} // namespace detail

/// Per (engine x motion kind): flow error averaged over seeded synthetic
/// instances, interior border excluded. The discontinuity kind additionally
/// reports the seam band on its own row. A "gt" control row checks the
/// metric path itself.
inline BenchReport flow_bench(const std::vector<engines::EngineId>& engine_list,
                              const EngineParams& params, const BenchOptions& opts = {}) {
    for (const engines::EngineId& e : engine_list)
        if (!e.is_native())
            throw InvalidInput("flow_bench: native engines only, got '" + e.name() + "'");

    static const synth::MotionKind kKinds[] = {
        synth::MotionKind::translation, synth::MotionKind::rotation, synth::MotionKind::radial,
        synth::MotionKind::discontinuity};

    std::vector<engines::EngineId> engines_run = engine_list;
    BenchReport report;
    for (size_t kind_idx = 0; kind_idx < std::size(kKinds); ++kind_idx) {
        const synth::MotionKind kind = kKinds[kind_idx];
        std::vector<synth::SynthPair> pairs(static_cast<size_t>(opts.seeds_per_kind));
        for (int s = 0; s < opts.seeds_per_kind; ++s)
            pairs[s] = synth::generate_pair(detail::bench_spec(
                kind, derive_seed(opts.master_seed, kind_idx * 1000 + s), opts.size));

        const int seam = opts.size / 2;
        auto interior = [&](int x, int y) {
            if (x < opts.interior_border || y < opts.interior_border ||
                x >= opts.size - opts.interior_border || y >= opts.size - opts.interior_border)
                return false;
            if (kind == synth::MotionKind::discontinuity &&
                std::abs(x - seam) <= opts.seam_halfwidth)
                return false;
            return true;
        };
        auto seam_band = [&](int x, int y) {
            return std::abs(x - seam) <= opts.seam_halfwidth && y >= opts.interior_border &&
                   y < opts.size - opts.interior_border;
        };

        for (const engines::EngineId& engine : engines_run) {
            std::vector<FlowErrorStats> inner(pairs.size()), seam_stats(pairs.size());
            parallel_for(pairs.size(), opts.jobs, [&](size_t i) {
                const FlowField flow =
                    compute_native_flow(engine, pairs[i].prev, pairs[i].next, params);
                inner[i] = flow_error_where(flow, pairs[i].gt, interior);
                if (kind == synth::MotionKind::discontinuity)
                    seam_stats[i] = flow_error_where(flow, pairs[i].gt, seam_band);
            });
            report.rows.push_back({engine.name(), to_string(kind), detail::average_stats(inner)});
            if (kind == synth::MotionKind::discontinuity)
                report.rows.push_back(
                    {engine.name(), to_string(kind) + "_seam", detail::average_stats(seam_stats)});
        }
        if (opts.include_gt_control) {
            std::vector<FlowErrorStats> control(pairs.size());
            for (size_t i = 0; i < pairs.size(); ++i)
                control[i] = flow_error_where(pairs[i].gt, pairs[i].gt, interior);
            report.rows.push_back({"gt", to_string(kind), detail::average_stats(control)});
        }
    }
    return report;
}

inline void write_bench_csv(const BenchReport& report, std::ostream& out) {
    out << "engine,kind,mean_epe,max_epe,mean_angular_error,inlier_fraction_0_5px\n";
    char buf[160];
    for (const BenchRow& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g", r.stats.mean_epe,
                      r.stats.max_epe, r.stats.mean_angular_error, r.stats.inlier_fraction_0_5px);
        out << r.engine << ',' << r.kind << ',' << buf << "\n";
    }
}

inline void write_bench_markdown(const BenchReport& report, std::ostream& out) {
    out << "# Synthetic flow benchmark\n\n";
    out << "| engine | kind | mean EPE | max EPE | mean angular | inliers (EPE<0.5) |\n";
    out << "|---|---|---|---|---|---|\n";
    char buf[160];
    for (const BenchRow& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%.4f | %.4f | %.4f | %.4f", r.stats.mean_epe,
                      r.stats.max_epe, r.stats.mean_angular_error, r.stats.inlier_fraction_0_5px);
        out << "| " << r.engine << " | " << r.kind << " | " << buf << " |\n";
    }
}

} // namespace flowbench::harness
