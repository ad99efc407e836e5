#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowbench/augment/augment.hpp"
#include "flowbench/eval/auc.hpp"
#include "flowbench/eval/splits.hpp"
#include "flowbench/eval/svm.hpp"
#include "flowbench/harness/ingest.hpp"
#include "flowbench/harness/pipeline.hpp"

namespace flowbench::harness {

struct CellResult {
    std::string engine;
    std::string descriptor;
    eval::AucReport auc;                    // macro AUC per split + mean/std
    std::vector<double> per_split_accuracy;
    double mean_accuracy = 0.0;
    std::vector<std::string> warnings;
    std::string error; // non-empty when the cell failed; other cells proceed
};

struct ExperimentResult {
    std::vector<std::string> sequence_ids;
    std::vector<IngestResult::Skip> skipped;
    eval::SplitPlan plan;
    std::vector<CellResult> cells; // engine-major, descriptor-minor order
    std::optional<augment::AugmentationReport> augmentation;
};

namespace detail {

struct FeatureTable {
    std::map<std::string, std::vector<double>> by_id;
};

inline FeatureTable extract_features(const std::vector<preprocess::SequenceRecord>& records,
                                     const std::vector<SequenceFlows>& flows,
                                     descriptors::DescriptorId descriptor,
                                     const descriptors::DescriptorOptions& opts) {
    FeatureTable table;
    for (size_t i = 0; i < records.size(); ++i)
        table.by_id[records[i].id] = sequence_feature(flows[i], descriptor, opts).values;
    return table;
}

/// Optional per-dimension z-scoring fit on the training rows only.
inline void zscore(eval::Features& train, eval::Features& test) {
    if (train.empty()) return;
    const size_t dim = train.front().size();
    std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
    for (const auto& row : train)
        for (size_t d = 0; d < dim; ++d) mean[d] += row[d];
    for (double& m : mean) m /= static_cast<double>(train.size());
    for (const auto& row : train)
        for (size_t d = 0; d < dim; ++d) sd[d] += (row[d] - mean[d]) * (row[d] - mean[d]);
    for (double& s : sd) s = std::sqrt(s / static_cast<double>(train.size()));
    auto apply = [&](eval::Features& rows) {
        for (auto& row : rows)
            for (size_t d = 0; d < dim; ++d) row[d] = sd[d] > 0 ? (row[d] - mean[d]) / sd[d] : 0.0;
    };
    apply(train);
    apply(test);
}

inline CellResult evaluate_cell(const FeatureTable& features,
                                const std::map<std::string, std::string>& label_by_id,
                                const eval::SplitPlan& plan, const ExperimentConfig& cfg) {
    CellResult cell;
    std::vector<double> aucs(plan.splits.size());
    cell.per_split_accuracy.resize(plan.splits.size());
    std::vector<std::vector<std::string>> warnings(plan.splits.size());

    parallel_for(plan.splits.size(), cfg.jobs, [&](size_t s) {
        const eval::SplitAssignment& split = plan.splits[s];
        eval::Features train_x, test_x;
        std::vector<std::string> train_y, test_y;
        for (const std::string& id : split.train_ids) {
            train_x.push_back(features.by_id.at(id));
            train_y.push_back(label_by_id.at(id));
        }
        for (const std::string& id : split.test_ids) {
            test_x.push_back(features.by_id.at(id));
            test_y.push_back(label_by_id.at(id));
        }
        if (cfg.zscore_features) zscore(train_x, test_x);
        eval::SvmTrainOptions opts;
        opts.C = cfg.svm_c;
        const eval::LinearSvmModel model = eval::train_linear_svm(train_x, train_y, opts);
        const eval::MulticlassAucResult auc_result =
            eval::multiclass_auc(model, test_x, test_y, cfg.micro_auc);
        aucs[s] = auc_result.macro;
        cell.per_split_accuracy[s] = eval::accuracy(model, test_x, test_y);
        warnings[s] = auc_result.warnings;
    });

    cell.auc = eval::mean_auc(aucs);
    double acc = 0.0;
    for (size_t s = 0; s < plan.splits.size(); ++s) {
        acc += cell.per_split_accuracy[s];
        for (const std::string& w : warnings[s])
            cell.warnings.push_back("split " + std::to_string(s) + ": " + w);
    }
    cell.mean_accuracy = acc / static_cast<double>(plan.splits.size());
    return cell;
}

} // namespace detail

/// The full pipeline: ingest, split, per (engine x descriptor) feature
/// extraction + linear-classifier evaluation, optional augmentation study.
/// Cell failures are recorded and do not abort the run.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const IngestResult ingest = ingest_dataset(cfg.dataset_root);
    if (ingest.records.size() < 4)
        throw ProtocolError("run_experiment: fewer than 4 usable sequences after ingestion");

    ExperimentResult result;
    result.skipped = ingest.skipped;
    std::vector<std::string> ids, labels;
    std::map<std::string, std::string> label_by_id;
    for (const preprocess::SequenceRecord& rec : ingest.records) {
        ids.push_back(rec.id);
        labels.push_back(preprocess::to_string(rec.label));
        label_by_id[rec.id] = preprocess::to_string(rec.label);
    }
    result.sequence_ids = ids;
    result.plan = eval::make_splits(ids, labels, cfg.split.c, cfg.split.ratio, cfg.master_seed);

    const FlowCache cache =
        cfg.cache_dir.empty() ? FlowCache() : FlowCache(cfg.cache_dir);

    // Feature tables shared between the evaluation cells and the
    // augmentation study, keyed by (engine, descriptor).
    std::map<std::string, std::map<descriptors::DescriptorId, detail::FeatureTable>> tables;
    auto features_for = [&](const engines::EngineId& engine,
                            descriptors::DescriptorId descriptor) -> const detail::FeatureTable& {
        auto& per_engine = tables[engine.name()];
        auto it = per_engine.find(descriptor);
        if (it == per_engine.end()) {
            const std::vector<SequenceFlows> flows =
                compute_flows(ingest.records, engine, cfg.params, cfg.tim_mode, cache, cfg.jobs,
                              cfg.external_flow_root, cfg.tim10_sum_consecutive);
            it = per_engine
                     .emplace(descriptor, detail::extract_features(ingest.records, flows,
                                                                   descriptor,
                                                                   cfg.descriptor_options))
                     .first;
        }
        return it->second;
    };

    for (const engines::EngineId& engine : cfg.engine_list) {
        for (descriptors::DescriptorId descriptor : cfg.descriptor_list) {
            CellResult cell;
            cell.engine = engine.name();
            cell.descriptor = descriptors::to_string(descriptor);
            try {
                cell = detail::evaluate_cell(features_for(engine, descriptor), label_by_id,
                                             result.plan, cfg);
                cell.engine = engine.name();
                cell.descriptor = descriptors::to_string(descriptor);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            result.cells.push_back(std::move(cell));
        }
    }

    if (cfg.augmentation) {
        const descriptors::DescriptorId aug_descriptor =
            cfg.augmentation->descriptor.value_or(cfg.descriptor_list.front());
        augment::FeatureStore store;
        auto fill = [&](const engines::EngineId& engine) {
            const detail::FeatureTable& table = features_for(engine, aug_descriptor);
            for (const auto& [id, values] : table.by_id) {
                descriptors::FeatureVector fv;
                fv.id = aug_descriptor;
                fv.values = values;
                store[engine.name()][id] = std::move(fv);
            }
        };
        fill(cfg.augmentation->base);
        for (const engines::EngineId& e : cfg.augmentation->pool) fill(e);
        eval::SvmTrainOptions opts;
        opts.C = cfg.svm_c;
        result.augmentation = augment::run_augmentation_experiment(
            store, label_by_id, cfg.augmentation->base, cfg.augmentation->pool, result.plan, opts);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Bundle emission

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_auc_csv(const ExperimentResult& result, const std::string& dataset_name,
                          const std::string& tim_mode, std::ostream& out) {
    out << "dataset,flow_engine,descriptor,tim_mode,split_id,auc\n";
    for (const CellResult& cell : result.cells) {
        if (!cell.error.empty()) continue;
        for (size_t s = 0; s < cell.auc.per_split.size(); ++s)
            out << dataset_name << ',' << cell.engine << ',' << cell.descriptor << ',' << tim_mode
                << ',' << s << ',' << detail::fmt(cell.auc.per_split[s]) << "\n";
        out << dataset_name << ',' << cell.engine << ',' << cell.descriptor << ',' << tim_mode
            << ",mean," << detail::fmt(cell.auc.mean) << "\n";
    }
}

inline void write_accuracy_csv(const ExperimentResult& result, const std::string& dataset_name,
                               const std::string& tim_mode, std::ostream& out) {
    out << "dataset,flow_engine,descriptor,tim_mode,split_id,accuracy\n";
    for (const CellResult& cell : result.cells) {
        if (!cell.error.empty()) continue;
        for (size_t s = 0; s < cell.per_split_accuracy.size(); ++s)
            out << dataset_name << ',' << cell.engine << ',' << cell.descriptor << ',' << tim_mode
                << ',' << s << ',' << detail::fmt(cell.per_split_accuracy[s]) << "\n";
        out << dataset_name << ',' << cell.engine << ',' << cell.descriptor << ',' << tim_mode
            << ",mean," << detail::fmt(cell.mean_accuracy) << "\n";
    }
}

/// Mean AUC table, descriptors as rows and engines as columns, ranked per
/// row (1 = best, bolded) the way the reference tables shade their cells.
inline void write_summary_markdown(const ExperimentResult& result, const ExperimentConfig& cfg,
                                   std::ostream& out) {
    out << "# Experiment summary\n\n";
    out << "- dataset: `" << cfg.dataset_root.string() << "`\n";
    out << "- temporal mode: " << preprocess::to_string(cfg.tim_mode) << "\n";
    out << "- splits: " << cfg.split.c << " x " << detail::fmt(cfg.split.ratio)
        << " train fraction, master seed " << cfg.master_seed << "\n";
    out << "- sequences: " << result.sequence_ids.size() << " (" << result.skipped.size()
        << " skipped)\n\n";
    out << "Mean AUC +- sample std over the splits; per-row rank in parentheses, best bolded.\n\n";

    std::vector<std::string> engines_order, descriptors_order;
    for (const engines::EngineId& e : cfg.engine_list) engines_order.push_back(e.name());
    for (descriptors::DescriptorId d : cfg.descriptor_list)
        descriptors_order.push_back(descriptors::to_string(d));

    auto cell_of = [&](const std::string& engine, const std::string& descriptor) -> const CellResult* {
        for (const CellResult& c : result.cells)
            if (c.engine == engine && c.descriptor == descriptor) return &c;
        return nullptr;
    };

    out << "| descriptor |";
    for (const std::string& e : engines_order) out << ' ' << e << " |";
    out << "\n|---|";
    for (size_t i = 0; i < engines_order.size(); ++i) out << "---|";
    out << "\n";
    for (const std::string& d : descriptors_order) {
        std::vector<double> row_means;
        for (const std::string& e : engines_order) {
            const CellResult* c = cell_of(e, d);
            row_means.push_back(c && c->error.empty() ? c->auc.mean : -1.0);
        }
        out << "| " << d << " |";
        for (size_t k = 0; k < engines_order.size(); ++k) {
            const CellResult* c = cell_of(engines_order[k], d);
            if (!c || !c->error.empty()) {
                out << " error |";
                continue;
            }
            int rank = 1;
            for (double m : row_means)
                if (m > row_means[k]) ++rank;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.3f +- %.3f (%d)", c->auc.mean, c->auc.std_dev, rank);
            if (rank == 1)
                out << " **" << buf << "** |";
            else
                out << ' ' << buf << " |";
        }
        out << "\n";
    }
    out << "\n";
    for (const CellResult& c : result.cells)
        if (!c.error.empty())
            out << "- cell (" << c.engine << ", " << c.descriptor << ") failed: " << c.error << "\n";
}

/// Every number in the bundle traces back to the seeds and parameters
/// recorded here.
inline nlohmann::json build_manifest(const ExperimentResult& result, const ExperimentConfig& cfg) {
    nlohmann::json m;
    m["dataset_root"] = cfg.dataset_root.string();
    m["tim_mode"] = preprocess::to_string(cfg.tim_mode);
    m["master_seed"] = cfg.master_seed;
    m["split"] = {{"c", cfg.split.c}, {"ratio", cfg.split.ratio}};
    m["split_seeds"] = result.plan.seeds;
    m["svm"] = {{"C", cfg.svm_c}, {"zscore", cfg.zscore_features}, {"micro_auc", cfg.micro_auc}};
    m["descriptor_options"] = {{"magnitude_weighted", cfg.descriptor_options.magnitude_weighted},
                               {"fold_hoof_bins", cfg.descriptor_options.fold_hoof_bins}};
    m["tim10_sum_consecutive"] = cfg.tim10_sum_consecutive;
    nlohmann::json engines_json = nlohmann::json::array();
    for (const engines::EngineId& e : cfg.engine_list) {
        engines_json.push_back({{"name", e.name()},
                               {"params", engine_param_string(e, cfg.params)},
                               {"params_hash", fnv1a_hex(engine_param_string(e, cfg.params))}});
    }
    m["engines"] = std::move(engines_json);
    nlohmann::json descs = nlohmann::json::array();
    for (descriptors::DescriptorId d : cfg.descriptor_list)
        descs.push_back(descriptors::to_string(d));
    m["descriptors"] = std::move(descs);
    m["sequences"] = result.sequence_ids;
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& s : result.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
    m["skipped"] = std::move(skipped);
    nlohmann::json cells = nlohmann::json::array();
    for (const CellResult& c : result.cells) {
        nlohmann::json cj;
        cj["engine"] = c.engine;
        cj["descriptor"] = c.descriptor;
        if (c.error.empty()) {
            cj["auc_mean"] = c.auc.mean;
            cj["auc_std"] = c.auc.std_dev;
            cj["accuracy_mean"] = c.mean_accuracy;
            cj["warnings"] = c.warnings;
        } else {
            cj["error"] = c.error;
        }
        cells.push_back(std::move(cj));
    }
    m["cells"] = std::move(cells);
    if (cfg.augmentation) {
        m["augmentation"] = {{"base", cfg.augmentation->base.name()},
                             {"pool_size", cfg.augmentation->pool.size()},
                             {"classifier", "linear C-SVC (substituted for the reference CNN)"}};
    }
    return m;
}

/// Writes the report bundle into cfg.output_dir. Bundle bytes are a pure
/// function of (dataset bytes, config); no clocks, no host names.
inline ExperimentResult run_experiment_and_write(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    ExperimentResult result = run_experiment(cfg);
    fs::create_directories(cfg.output_dir);
    const std::string dataset_name = cfg.dataset_root.filename().string();
    const std::string tim = preprocess::to_string(cfg.tim_mode);
    {
        std::ofstream out(cfg.output_dir / "auc_report.csv", std::ios::trunc);
        write_auc_csv(result, dataset_name, tim, out);
    }
    {
        std::ofstream out(cfg.output_dir / "accuracy_report.csv", std::ios::trunc);
        write_accuracy_csv(result, dataset_name, tim, out);
    }
    {
        std::ofstream out(cfg.output_dir / "summary.md", std::ios::trunc);
        write_summary_markdown(result, cfg, out);
    }
    {
        std::ofstream out(cfg.output_dir / "manifest.json", std::ios::trunc);
        out << build_manifest(result, cfg).dump(2) << "\n";
    }
    if (result.augmentation) {
        std::ofstream csv(cfg.output_dir / "augmentation.csv", std::ios::trunc);
        augment::write_augmentation_csv(*result.augmentation, csv);
        std::ofstream md(cfg.output_dir / "augmentation.md", std::ios::trunc);
        augment::write_augmentation_markdown(*result.augmentation, md);
    }
    return result;
}

} // namespace flowbench::harness
