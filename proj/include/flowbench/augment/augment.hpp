#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "flowbench/descriptors/descriptors.hpp"
#include "flowbench/engines/params.hpp"
#include "flowbench/error.hpp"
#include "flowbench/eval/auc.hpp"
#include "flowbench/eval/splits.hpp"
#include "flowbench/eval/svm.hpp"

namespace flowbench::augment {

/// One cross-flow augmentation setting: the base engine supplies train and
/// test representations, the augmenting subset adds extra training rows.
struct AugmentationConfig {
    engines::EngineId base_engine;
    std::vector<engines::EngineId> augmenting_engines;
    uint32_t config_id = 0; // bitmask over the pool, bit k = pool[k]
};

/// All 2^|pool| subsets in bitmask order; the empty (baseline) set first.
inline std::vector<AugmentationConfig> enumerate_configs(
    const engines::EngineId& base, const std::vector<engines::EngineId>& pool) {
    if (pool.size() > 20) throw InvalidInput("enumerate_configs: pool too large");
    for (const engines::EngineId& e : pool)
        if (e == base)
            throw InvalidInput("enumerate_configs: base engine '" + base.name() +
                               "' must not appear in the augmentation pool");
    std::vector<AugmentationConfig> out;
    const uint32_t count = 1u << pool.size();
    out.reserve(count);
    for (uint32_t mask = 0; mask < count; ++mask) {
        AugmentationConfig cfg;
        cfg.base_engine = base;
        cfg.config_id = mask;
        for (size_t k = 0; k < pool.size(); ++k)
            if (mask & (1u << k)) cfg.augmenting_engines.push_back(pool[k]);
        out.push_back(std::move(cfg));
    }
    return out;
}

/// engine name -> sample id -> feature vector.
using FeatureStore = std::map<std::string, std::map<std::string, descriptors::FeatureVector>>;

struct TrainingSet {
    std::vector<std::string> ids; // augmented rows carry an "#<engine>" suffix
    eval::Features features;
    std::vector<std::string> labels;
};

inline std::string id_root(const std::string& id) { return id.substr(0, id.find('#')); }

namespace detail {

inline const descriptors::FeatureVector& lookup(const FeatureStore& store,
                                                const std::string& engine,
                                                const std::string& id) {
    const auto eng = store.find(engine);
    if (eng == store.end())
        throw ProtocolError("feature store has no engine '" + engine + "'");
    const auto it = eng->second.find(id);
    if (it == eng->second.end())
        throw ProtocolError("feature store is missing (" + engine + ", " + id + ")");
    return it->second;
}

} // namespace detail

/// Base-engine train rows plus, per augmenting engine, that engine's features
/// of the same train ids. Never touches test ids (asserted).
inline TrainingSet build_augmented_train(const eval::SplitAssignment& split,
                                         const AugmentationConfig& config,
                                         const FeatureStore& store,
                                         const std::map<std::string, std::string>& label_by_id) {
    std::set<std::string> test_ids(split.test_ids.begin(), split.test_ids.end());
    TrainingSet out;
    auto append = [&](const engines::EngineId& engine, bool suffix) {
        for (const std::string& id : split.train_ids) {
            if (test_ids.count(id))
                throw ProtocolError("leakage: train id '" + id + "' is also a test id");
            const descriptors::FeatureVector& fv = detail::lookup(store, engine.name(), id);
            out.ids.push_back(suffix ? id + "#" + engine.name() : id);
            out.features.push_back(fv.values);
            const auto lbl = label_by_id.find(id);
            if (lbl == label_by_id.end())
                throw ProtocolError("no label for sample '" + id + "'");
            out.labels.push_back(lbl->second);
        }
    };
    append(config.base_engine, false);
    for (const engines::EngineId& e : config.augmenting_engines) append(e, true);

    for (const std::string& id : out.ids)
        if (test_ids.count(id_root(id)))
            throw ProtocolError("leakage: augmented row '" + id + "' roots in the test set");
    return out;
}

struct AugmentationConfigResult {
    uint32_t config_id = 0;
    std::vector<std::string> engine_names; // augmenting engines only
    std::vector<double> per_split_accuracy;
    double mean_accuracy = 0.0;
};

struct AugmentationReport {
    std::string base_engine;
    std::vector<std::string> pool;
    std::vector<AugmentationConfigResult> configs; // config_id order; [0] is the baseline
    double baseline_accuracy = 0.0;

    std::vector<double> deltas_vs_baseline() const {
        std::vector<double> d;
        d.reserve(configs.size());
        for (const auto& c : configs) d.push_back(c.mean_accuracy - baseline_accuracy);
        return d;
    }
};

/// Runs every configuration over the same split plan: train on the augmented
/// set, measure accuracy on the base-engine test rows.
inline AugmentationReport run_augmentation_experiment(
    const FeatureStore& store, const std::map<std::string, std::string>& label_by_id,
    const engines::EngineId& base, const std::vector<engines::EngineId>& pool,
    const eval::SplitPlan& plan, const eval::SvmTrainOptions& svm_opts = {}) {
    AugmentationReport report;
    report.base_engine = base.name();
    for (const engines::EngineId& e : pool) report.pool.push_back(e.name());

    for (const AugmentationConfig& cfg : enumerate_configs(base, pool)) {
        AugmentationConfigResult result;
        result.config_id = cfg.config_id;
        for (const engines::EngineId& e : cfg.augmenting_engines)
            result.engine_names.push_back(e.name());

        double acc_sum = 0.0;
        for (const eval::SplitAssignment& split : plan.splits) {
            const TrainingSet train = build_augmented_train(split, cfg, store, label_by_id);
            const eval::LinearSvmModel model =
                eval::train_linear_svm(train.features, train.labels, svm_opts);

            eval::Features test_x;
            std::vector<std::string> test_y;
            for (const std::string& id : split.test_ids) {
                test_x.push_back(detail::lookup(store, base.name(), id).values);
                test_y.push_back(label_by_id.at(id));
            }
            const double acc = eval::accuracy(model, test_x, test_y);
            result.per_split_accuracy.push_back(acc);
            acc_sum += acc;
        }
        result.mean_accuracy = acc_sum / static_cast<double>(plan.splits.size());
        report.configs.push_back(std::move(result));
    }
    report.baseline_accuracy = report.configs.front().mean_accuracy;
    return report;
}

// ---------------------------------------------------------------------------
// Report emission

/// Rows: base_engine,config_bitmask,engines_in_config,split_id,accuracy
/// plus one aggregate row per configuration (split_id = "mean").
inline void write_augmentation_csv(const AugmentationReport& report, std::ostream& out) {
    out << "base_engine,config_bitmask,engines_in_config,split_id,accuracy\n";
    char buf[64];
    for (const AugmentationConfigResult& c : report.configs) {
        std::string engines_joined;
        for (size_t i = 0; i < c.engine_names.size(); ++i) {
            if (i) engines_joined += "+";
            engines_joined += c.engine_names[i];
        }
        if (engines_joined.empty()) engines_joined = "-";
        for (size_t s = 0; s < c.per_split_accuracy.size(); ++s) {
            std::snprintf(buf, sizeof(buf), "%.17g", c.per_split_accuracy[s]);
            out << report.base_engine << ',' << c.config_id << ',' << engines_joined << ',' << s
                << ',' << buf << "\n";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", c.mean_accuracy);
        out << report.base_engine << ',' << c.config_id << ',' << engines_joined << ",mean," << buf
            << "\n";
    }
}

/// Markdown table with configurations as columns (filled boxes mark the
/// engines augmenting that column); the top three accuracies are bolded.
inline void write_augmentation_markdown(const AugmentationReport& report, std::ostream& out) {
    out << "## Cross-flow augmentation: base engine `" << report.base_engine << "`\n\n";
    out << "Classifier: linear C-SVC (substituted for the reference CNN); fixed seeds, "
           "identical splits across configurations.\n\n";
    std::vector<double> sorted;
    for (const auto& c : report.configs) sorted.push_back(c.mean_accuracy);
    std::sort(sorted.rbegin(), sorted.rend());
    const double third_best = sorted[std::min<size_t>(2, sorted.size() - 1)];

    out << "| augmentation |";
    for (const auto& c : report.configs) out << " " << c.config_id << " |";
    out << "\n|---|";
    for (size_t i = 0; i < report.configs.size(); ++i) out << "---|";
    out << "\n";
    for (size_t k = 0; k < report.pool.size(); ++k) {
        out << "| " << report.pool[k] << " |";
        for (const auto& c : report.configs)
            out << ((c.config_id >> k) & 1u ? " x |" : "   |");
        out << "\n";
    }
    out << "| **accuracy** |";
    char buf[32];
    for (const auto& c : report.configs) {
        std::snprintf(buf, sizeof(buf), "%.4f", c.mean_accuracy);
        if (c.mean_accuracy >= third_best)
            out << " **" << buf << "** |";
        else
            out << " " << buf << " |";
    }
    out << "\n";
}

} // namespace flowbench::augment
