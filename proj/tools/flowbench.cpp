// flowbench command-line interface: synthetic data generation, dataset
// checks, flow computation, benchmark runs, and the augmentation study.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "flowbench/harness/bench.hpp"
#include "flowbench/harness/config.hpp"
#include "flowbench/harness/experiment.hpp"
#include "flowbench/harness/ingest.hpp"
#include "flowbench/harness/pipeline.hpp"
#include "flowbench/synth/dataset_io.hpp"

namespace fs = std::filesystem;
using namespace flowbench;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::map<std::string, std::string> overrides; // flat config keys from flags
};

harness::ExperimentConfig resolve_config(const GlobalArgs& args) {
    harness::ExperimentConfig cfg;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw FormatError("cannot open config file " + args.config_path);
        harness::apply_config_keys(cfg, harness::parse_config_text(in));
    }
    harness::apply_config_keys(cfg, args.overrides);
    return cfg;
}

int run_ingest_check(const harness::ExperimentConfig& cfg) {
    const harness::IngestResult result = harness::ingest_dataset(cfg.dataset_root);
    std::map<std::string, int> per_label;
    for (const auto& rec : result.records) ++per_label[preprocess::to_string(rec.label)];
    std::printf("dataset %s: %zu sequence(s) ingested, %zu skipped\n",
                cfg.dataset_root.string().c_str(), result.records.size(), result.skipped.size());
    for (const auto& [label, count] : per_label) std::printf("  %-10s %d\n", label.c_str(), count);
    for (const auto& skip : result.skipped)
        std::printf("  skipped %s: %s\n", skip.id.c_str(), skip.reason.c_str());
    return result.records.empty() ? 1 : 0;
}

int run_compute_flows(const harness::ExperimentConfig& cfg) {
    if (cfg.cache_dir.empty())
        throw InvalidInput("compute-flows needs --cache-dir (or cache_dir in the config)");
    const harness::IngestResult result = harness::ingest_dataset(cfg.dataset_root);
    const harness::FlowCache cache(cfg.cache_dir);
    for (const engines::EngineId& engine : cfg.engine_list) {
        size_t flows = 0;
        const auto all = harness::compute_flows(result.records, engine, cfg.params, cfg.tim_mode,
                                                cache, cfg.jobs, cfg.external_flow_root,
                                                cfg.tim10_sum_consecutive);
        for (const auto& sf : all) flows += sf.flows.size();
        std::printf("engine %-12s %zu sequence(s), %zu selected flow(s) cached under %s\n",
                    engine.name().c_str(), all.size(), flows, cfg.cache_dir.string().c_str());
    }
    return 0;
}

int run_experiment_cmd(const harness::ExperimentConfig& cfg, bool require_augmentation) {
    if (require_augmentation && !cfg.augmentation)
        throw InvalidInput("the augment command needs augment.base/augment.pool in the config");
    const harness::ExperimentResult result = harness::run_experiment_and_write(cfg);
    std::printf("bundle written to %s\n", cfg.output_dir.string().c_str());
    for (const harness::CellResult& cell : result.cells) {
        if (cell.error.empty())
            std::printf("  %-12s %-5s mean AUC %.4f +- %.4f, mean accuracy %.4f\n",
                        cell.engine.c_str(), cell.descriptor.c_str(), cell.auc.mean,
                        cell.auc.std_dev, cell.mean_accuracy);
        else
            std::printf("  %-12s %-5s FAILED: %s\n", cell.engine.c_str(),
                        cell.descriptor.c_str(), cell.error.c_str());
    }
    if (result.augmentation) {
        std::printf("  augmentation base %s: baseline accuracy %.4f over %zu configuration(s)\n",
                    result.augmentation->base_engine.c_str(),
                    result.augmentation->baseline_accuracy, result.augmentation->configs.size());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optical-flow facial-expression benchmark toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand name

    GlobalArgs args;
    app.add_option("--config", args.config_path, "experiment config file (key = value lines)");
    auto add_override = [&](const char* flag, const char* key, const char* help) {
        app.add_option_function<std::string>(
               flag, [&args, key](const std::string& v) { args.overrides[key] = v; }, help)
            ->expected(1);
    };
    add_override("--seed", "seed", "master seed");
    add_override("--jobs", "jobs", "worker threads (outputs never depend on this)");
    add_override("--cache-dir", "cache_dir", "flow cache directory");
    add_override("--output-dir", "output_dir", "report bundle directory");
    add_override("--dataset-root", "dataset_root", "dataset directory");
    add_override("--engines", "engines", "comma list: farneback,tvl1,patchmatch,external:NAME");
    add_override("--descriptors", "descriptors", "comma list: raw,hof,hoof,lmp");
    add_override("--tim", "tim", "TIM2 | TIM10");
    add_override("--external-flow-root", "external_flow_root", "precomputed .flo root");

    CLI::App* synth_gen = app.add_subcommand("synth-gen", "generate a synthetic dataset");
    std::string synth_out = "data/synth";
    int synth_classes = 6, synth_per_class = 4, synth_frames = 12, synth_size = 64;
    uint64_t synth_seed = 1;
    bool synth_gt = false;
    synth_gen->add_option("--out", synth_out, "output dataset directory");
    synth_gen->add_option("--classes", synth_classes, "number of expression classes (1..6)");
    synth_gen->add_option("--per-class", synth_per_class, "sequences per class");
    synth_gen->add_option("--frames", synth_frames, "frames per sequence (>= 10)");
    synth_gen->add_option("--size", synth_size, "raw frame side length");
    synth_gen->add_option("--gen-seed", synth_seed, "dataset seed");
    synth_gen->add_flag("--emit-gt-flows", synth_gt, "also write raw-scale ground-truth .flo files");

    CLI::App* ingest_check = app.add_subcommand("ingest-check", "ingest and summarize a dataset");
    CLI::App* compute_flows = app.add_subcommand("compute-flows", "fill the flow cache");
    CLI::App* run = app.add_subcommand("run", "run the full benchmark and write the bundle");
    CLI::App* augment_cmd = app.add_subcommand("augment", "run the cross-flow augmentation study");

    CLI::App* bench = app.add_subcommand("bench-flows", "EPE table on synthetic ground truth");
    std::string bench_out;
    int bench_seeds = 10, bench_size = 64;
    bench->add_option("--out", bench_out, "output file prefix (writes .csv and .md)");
    bench->add_option("--seeds", bench_seeds, "instances per motion kind");
    bench->add_option("--size", bench_size, "raster side length");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_gen->parsed()) {
            synth::ExpressionDatasetSpec spec;
            spec.classes = synth_classes;
            spec.sequences_per_class = synth_per_class;
            spec.frames_per_sequence = synth_frames;
            spec.seed = synth_seed;
            spec.width = synth_size;
            spec.height = synth_size;
            const synth::ExpressionDataset dataset = synth::generate_expression_dataset(spec);
            synth::write_dataset(dataset, synth_out, synth_gt);
            std::printf("wrote %zu sequence(s) to %s\n", dataset.sequences.size(),
                        synth_out.c_str());
            return 0;
        }

        harness::ExperimentConfig cfg = resolve_config(args);
        if (ingest_check->parsed()) return run_ingest_check(cfg);
        if (compute_flows->parsed()) return run_compute_flows(cfg);
        if (run->parsed()) return run_experiment_cmd(cfg, false);
        if (augment_cmd->parsed()) return run_experiment_cmd(cfg, true);
        if (bench->parsed()) {
            harness::BenchOptions opts;
            opts.seeds_per_kind = bench_seeds;
            opts.size = bench_size;
            opts.master_seed = cfg.master_seed;
            opts.jobs = cfg.jobs;
            std::vector<engines::EngineId> native;
            for (const engines::EngineId& e : cfg.engine_list)
                if (e.is_native()) native.push_back(e);
            if (native.empty())
                native = {engines::EngineId::farneback(), engines::EngineId::tvl1(),
                          engines::EngineId::patchmatch()};
            const harness::BenchReport report = harness::flow_bench(native, cfg.params, opts);
            if (bench_out.empty()) {
                harness::write_bench_markdown(report, std::cout);
            } else {
                std::ofstream csv(bench_out + ".csv", std::ios::trunc);
                harness::write_bench_csv(report, csv);
                std::ofstream md(bench_out + ".md", std::ios::trunc);
                harness::write_bench_markdown(report, md);
                std::printf("wrote %s.csv and %s.md\n", bench_out.c_str(), bench_out.c_str());
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
