#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flowbench/descriptors/descriptors.hpp"
#include "flowbench/engines/params.hpp"
#include "flowbench/error.hpp"
#include "flowbench/preprocess/motion.hpp"

namespace flowbench::harness {

/// Native engine parameters, one bundle per run.
struct EngineParams {
    engines::FarnebackParams farneback;
    engines::TvL1Params tvl1;
    engines::PatchMatchParams patchmatch;
};

struct SplitConfig {
    int c = 10;
    double ratio = 0.6;
};

struct AugmentConfig {
    engines::EngineId base = engines::EngineId::farneback();
    std::vector<engines::EngineId> pool;
    std::optional<descriptors::DescriptorId> descriptor; // default: first configured
};

struct ExperimentConfig {
    std::filesystem::path dataset_root;
    std::filesystem::path output_dir = "out";
    std::filesystem::path cache_dir;              // empty: no cache
    std::filesystem::path external_flow_root;     // .flo ingestion for external engines
    std::vector<engines::EngineId> engine_list = {engines::EngineId::farneback()};
    std::vector<descriptors::DescriptorId> descriptor_list = {descriptors::DescriptorId::hof};
    preprocess::TimMode tim_mode = preprocess::TimMode::tim2;
    SplitConfig split;
    uint64_t master_seed = 42;
    int jobs = 1;
    EngineParams params;
    descriptors::DescriptorOptions descriptor_options;
    double svm_c = 1.0;
    bool zscore_features = false;      // z-score per dimension from train statistics
    bool micro_auc = false;            // micro instead of macro one-vs-rest averaging
    bool tim10_sum_consecutive = false; // alternative TIM10 reading: sum flows between keys
    std::optional<AugmentConfig> augmentation;

    void validate() const {
        if (engine_list.empty()) throw InvalidInput("config: at least one engine required");
        if (descriptor_list.empty()) throw InvalidInput("config: at least one descriptor required");
        const bool has_raw = std::any_of(descriptor_list.begin(), descriptor_list.end(),
                                         [](auto d) { return d == descriptors::DescriptorId::raw; });
        if (has_raw && tim_mode != preprocess::TimMode::tim2)
            throw InvalidInput("config: the raw descriptor is only valid with TIM2");
        params.farneback.validate();
        params.tvl1.validate();
        params.patchmatch.validate();
        if (jobs < 1) throw InvalidInput("config: jobs must be >= 1");
        if (split.c < 1 || !(split.ratio > 0.0 && split.ratio < 1.0))
            throw InvalidInput("config: bad split settings");
        if (augmentation) {
            for (const engines::EngineId& e : augmentation->pool)
                if (e == augmentation->base)
                    throw InvalidInput("config: augment.base must not appear in augment.pool");
        }
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace detail

/// Flat key = value text, one experiment per file. '#' starts a comment.
inline std::map<std::string, std::string> parse_config_text(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = detail::trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw FormatError("config line " + std::to_string(line_no) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

/// Applies flat keys onto a config. Unknown keys are rejected so typos
/// surface instead of silently using defaults.
inline void apply_config_keys(ExperimentConfig& cfg,
                              const std::map<std::string, std::string>& kv) {
    auto as_int = [](const std::string& k, const std::string& v) {
        try {
            return std::stoi(v);
        } catch (...) {
            throw FormatError("config key '" + k + "': expected an integer, got '" + v + "'");
        }
    };
    auto as_double = [](const std::string& k, const std::string& v) {
        try {
            return std::stod(v);
        } catch (...) {
            throw FormatError("config key '" + k + "': expected a number, got '" + v + "'");
        }
    };
    auto as_u64 = [](const std::string& k, const std::string& v) -> uint64_t {
        try {
            return std::stoull(v);
        } catch (...) {
            throw FormatError("config key '" + k + "': expected a seed, got '" + v + "'");
        }
    };
    auto as_bool = [](const std::string& k, const std::string& v) {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw FormatError("config key '" + k + "': expected a boolean, got '" + v + "'");
    };

    for (const auto& [key, value] : kv) {
        if (key == "dataset_root") cfg.dataset_root = value;
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "cache_dir") cfg.cache_dir = value;
        else if (key == "external_flow_root") cfg.external_flow_root = value;
        else if (key == "engines") {
            cfg.engine_list.clear();
            for (const std::string& name : detail::split_list(value))
                cfg.engine_list.push_back(engines::EngineId::parse(name));
        } else if (key == "descriptors") {
            cfg.descriptor_list.clear();
            for (const std::string& name : detail::split_list(value))
                cfg.descriptor_list.push_back(descriptors::parse_descriptor_id(name));
        } else if (key == "tim") cfg.tim_mode = preprocess::parse_tim_mode(value);
        else if (key == "splits.c") cfg.split.c = as_int(key, value);
        else if (key == "splits.ratio") cfg.split.ratio = as_double(key, value);
        else if (key == "seed") cfg.master_seed = as_u64(key, value);
        else if (key == "jobs") cfg.jobs = as_int(key, value);
        else if (key == "svm.C") cfg.svm_c = as_double(key, value);
        else if (key == "eval.zscore") cfg.zscore_features = as_bool(key, value);
        else if (key == "eval.micro_auc") cfg.micro_auc = as_bool(key, value);
        else if (key == "tim10.sum_consecutive") cfg.tim10_sum_consecutive = as_bool(key, value);
        else if (key == "descriptor.count_votes")
            cfg.descriptor_options.magnitude_weighted = !as_bool(key, value);
        else if (key == "descriptor.fold_hoof")
            cfg.descriptor_options.fold_hoof_bins = as_bool(key, value);
        else if (key == "augment.base") {
            if (!cfg.augmentation) cfg.augmentation.emplace();
            cfg.augmentation->base = engines::EngineId::parse(value);
        } else if (key == "augment.pool") {
            if (!cfg.augmentation) cfg.augmentation.emplace();
            cfg.augmentation->pool.clear();
            for (const std::string& name : detail::split_list(value))
                cfg.augmentation->pool.push_back(engines::EngineId::parse(name));
        } else if (key == "augment.descriptor") {
            if (!cfg.augmentation) cfg.augmentation.emplace();
            cfg.augmentation->descriptor = descriptors::parse_descriptor_id(value);
        } else if (key == "farneback.levels") cfg.params.farneback.pyramid_levels = as_int(key, value);
        else if (key == "farneback.scale") cfg.params.farneback.pyramid_scale = static_cast<float>(as_double(key, value));
        else if (key == "farneback.window_size") cfg.params.farneback.window_size = as_int(key, value);
        else if (key == "farneback.iterations") cfg.params.farneback.iterations_per_level = as_int(key, value);
        else if (key == "farneback.poly_n") cfg.params.farneback.poly_n = as_int(key, value);
        else if (key == "farneback.poly_sigma") cfg.params.farneback.poly_sigma = static_cast<float>(as_double(key, value));
        else if (key == "tvl1.lambda") cfg.params.tvl1.lambda = as_double(key, value);
        else if (key == "tvl1.theta") cfg.params.tvl1.theta = as_double(key, value);
        else if (key == "tvl1.tau") cfg.params.tvl1.tau = as_double(key, value);
        else if (key == "tvl1.warps") cfg.params.tvl1.warps_per_level = as_int(key, value);
        else if (key == "tvl1.inner") cfg.params.tvl1.inner_iterations = as_int(key, value);
        else if (key == "tvl1.levels") cfg.params.tvl1.pyramid_levels = as_int(key, value);
        else if (key == "tvl1.scale") cfg.params.tvl1.pyramid_scale = static_cast<float>(as_double(key, value));
        else if (key == "tvl1.stop") cfg.params.tvl1.stop_epsilon = as_double(key, value);
        else if (key == "patchmatch.radius") cfg.params.patchmatch.patch_radius = as_int(key, value);
        else if (key == "patchmatch.iterations") cfg.params.patchmatch.propagation_iterations = as_int(key, value);
        else if (key == "patchmatch.search_radius") cfg.params.patchmatch.random_search_radius = as_double(key, value);
        else if (key == "patchmatch.decay") cfg.params.patchmatch.search_decay = as_double(key, value);
        else if (key == "patchmatch.fb_threshold") cfg.params.patchmatch.fb_consistency_threshold = as_double(key, value);
        else if (key == "patchmatch.hierarchy") cfg.params.patchmatch.hierarchy_levels = as_int(key, value);
        else if (key == "patchmatch.seed") cfg.params.patchmatch.rng_seed = as_u64(key, value);
        else throw FormatError("config: unknown key '" + key + "'");
    }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("config: cannot open " + path.string());
    ExperimentConfig cfg;
    apply_config_keys(cfg, parse_config_text(in));
    return cfg;
}

/// Canonical parameter string for one engine; hashed into cache keys.
inline std::string engine_param_string(const engines::EngineId& id, const EngineParams& p) {
    char buf[256];
    switch (id.kind) {
        case engines::EngineId::Kind::farneback:
            std::snprintf(buf, sizeof(buf), "farneback;levels=%d;scale=%.6g;win=%d;iters=%d;n=%d;sigma=%.6g",
                          p.farneback.pyramid_levels, p.farneback.pyramid_scale,
                          p.farneback.window_size, p.farneback.iterations_per_level,
                          p.farneback.poly_n, p.farneback.poly_sigma);
            break;
        case engines::EngineId::Kind::tvl1:
            std::snprintf(buf, sizeof(buf),
                          "tvl1;lambda=%.6g;theta=%.6g;tau=%.6g;warps=%d;inner=%d;levels=%d;scale=%.6g;stop=%.6g",
                          p.tvl1.lambda, p.tvl1.theta, p.tvl1.tau, p.tvl1.warps_per_level,
                          p.tvl1.inner_iterations, p.tvl1.pyramid_levels, p.tvl1.pyramid_scale,
                          p.tvl1.stop_epsilon);
            break;
        case engines::EngineId::Kind::patchmatch:
            std::snprintf(buf, sizeof(buf),
                          "patchmatch;r=%d;iters=%d;search=%.6g;decay=%.6g;fb=%.6g;levels=%d;seed=%llu",
                          p.patchmatch.patch_radius, p.patchmatch.propagation_iterations,
                          p.patchmatch.random_search_radius, p.patchmatch.search_decay,
                          p.patchmatch.fb_consistency_threshold, p.patchmatch.hierarchy_levels,
                          static_cast<unsigned long long>(p.patchmatch.rng_seed));
            break;
        case engines::EngineId::Kind::external:
            std::snprintf(buf, sizeof(buf), "external;name=%s", id.external_name.c_str());
            break;
    }
    return buf;
}

} // namespace flowbench::harness
