#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "flowbench/augment/augment.hpp"

using namespace flowbench;
using namespace flowbench::augment;
using engines::EngineId;

namespace {

struct Fixture {
    FeatureStore store;
    std::map<std::string, std::string> labels;
    std::vector<std::string> ids;
    std::vector<std::string> label_list;
};

/// Separable 3-class features for a base engine plus noisy clones of the
/// same features for two augmenting engines (benign augmentation).
Fixture make_fixture(int per_class = 20, double clone_noise = 0.05, uint64_t seed = 1) {
    Fixture fx;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 0.4);
    std::normal_distribution<double> clone(0.0, clone_noise);
    const std::vector<std::pair<double, double>> centers = {{-3, 0}, {3, 0}, {0, 4}};
    for (size_t c = 0; c < centers.size(); ++c) {
        for (int i = 0; i < per_class; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "c%zu_%03d", c, i);
            const std::string label = "class" + std::to_string(c);
            descriptors::FeatureVector fv;
            fv.id = descriptors::DescriptorId::hof;
            fv.values = {centers[c].first + jitter(rng), centers[c].second + jitter(rng)};
            fx.store["farneback"][id] = fv;
            for (const char* eng : {"tvl1", "patchmatch"}) {
                descriptors::FeatureVector noisy = fv;
                for (double& v : noisy.values) v += clone(rng);
                fx.store[eng][id] = noisy;
            }
            fx.labels[id] = label;
            fx.ids.push_back(id);
            fx.label_list.push_back(label);
        }
    }
    return fx;
}

} // namespace

TEST_CASE("enumerate_configs: subset counts and bitmask order") {
    const EngineId base = EngineId::farneback();
    std::vector<EngineId> pool5 = {EngineId::tvl1(), EngineId::patchmatch(),
                                   EngineId::external("ldof"), EngineId::external("epicflow"),
                                   EngineId::external("pwcnet")};
    REQUIRE(enumerate_configs(base, pool5).size() == 32);
    REQUIRE(enumerate_configs(base, {}).size() == 1);

    std::vector<EngineId> pool2 = {EngineId::tvl1(), EngineId::patchmatch()};
    auto configs = enumerate_configs(base, pool2);
    REQUIRE(configs.size() == 4);
    REQUIRE(configs[0].augmenting_engines.empty());
    REQUIRE(configs[1].augmenting_engines == std::vector<EngineId>{EngineId::tvl1()});
    REQUIRE(configs[2].augmenting_engines == std::vector<EngineId>{EngineId::patchmatch()});
    REQUIRE(configs[3].augmenting_engines.size() == 2);
    for (uint32_t i = 0; i < 4; ++i) REQUIRE(configs[i].config_id == i);
}

TEST_CASE("enumerate_configs: base inside the pool is rejected") {
    std::vector<EngineId> pool = {EngineId::tvl1(), EngineId::farneback()};
    REQUIRE_THROWS_AS(enumerate_configs(EngineId::farneback(), pool), InvalidInput);
}

TEST_CASE("build_augmented_train: empty set reproduces the base train set") {
    Fixture fx = make_fixture();
    eval::SplitPlan plan = eval::make_splits(fx.ids, fx.label_list, 3, 0.6, 5);
    auto cfg = enumerate_configs(EngineId::farneback(), {EngineId::tvl1()})[0];
    TrainingSet train = build_augmented_train(plan.splits[0], cfg, fx.store, fx.labels);
    REQUIRE(train.ids == plan.splits[0].train_ids);
    for (size_t i = 0; i < train.ids.size(); ++i)
        REQUIRE(train.features[i] == fx.store["farneback"][train.ids[i]].values);
}

TEST_CASE("build_augmented_train: cardinality and leakage invariants") {
    Fixture fx = make_fixture();
    eval::SplitPlan plan = eval::make_splits(fx.ids, fx.label_list, 3, 0.5, 6);
    std::vector<EngineId> pool = {EngineId::tvl1(), EngineId::patchmatch()};
    for (const AugmentationConfig& cfg : enumerate_configs(EngineId::farneback(), pool)) {
        for (const eval::SplitAssignment& split : plan.splits) {
            TrainingSet train = build_augmented_train(split, cfg, fx.store, fx.labels);
            REQUIRE(train.ids.size() ==
                    split.train_ids.size() * (1 + cfg.augmenting_engines.size()));
            std::set<std::string> test_ids(split.test_ids.begin(), split.test_ids.end());
            for (const std::string& id : train.ids) REQUIRE(!test_ids.count(id_root(id)));
        }
    }
}

TEST_CASE("build_augmented_train: missing features name the gap") {
    Fixture fx = make_fixture();
    eval::SplitPlan plan = eval::make_splits(fx.ids, fx.label_list, 1, 0.6, 7);
    auto configs = enumerate_configs(EngineId::farneback(), {EngineId::tvl1()});
    fx.store["tvl1"].erase(plan.splits[0].train_ids[0]);
    REQUIRE_THROWS_MATCHES(
        build_augmented_train(plan.splits[0], configs[1], fx.store, fx.labels), ProtocolError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring(plan.splits[0].train_ids[0])));
}

TEST_CASE("build_augmented_train: an id on both sides trips the leakage check") {
    Fixture fx = make_fixture();
    eval::SplitAssignment bad;
    bad.train_ids = {"c0_000", "c0_001", "c1_000", "c1_001"};
    bad.test_ids = {"c0_000", "c2_000"};
    auto cfg = enumerate_configs(EngineId::farneback(), {})[0];
    REQUIRE_THROWS_MATCHES(build_augmented_train(bad, cfg, fx.store, fx.labels), ProtocolError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("leakage")));
}

TEST_CASE("run_augmentation_experiment: deterministic and baseline-consistent") {
    Fixture fx = make_fixture();
    eval::SplitPlan plan = eval::make_splits(fx.ids, fx.label_list, 5, 0.6, 8);
    std::vector<EngineId> pool = {EngineId::tvl1(), EngineId::patchmatch()};

    AugmentationReport a = run_augmentation_experiment(fx.store, fx.labels,
                                                       EngineId::farneback(), pool, plan);
    AugmentationReport b = run_augmentation_experiment(fx.store, fx.labels,
                                                       EngineId::farneback(), pool, plan);
    std::ostringstream csv_a, csv_b;
    write_augmentation_csv(a, csv_a);
    write_augmentation_csv(b, csv_b);
    REQUIRE(csv_a.str() == csv_b.str());
    REQUIRE(a.configs.size() == 4);

    // Baseline row bit-matches the plain eval pipeline on the same splits.
    for (size_t s = 0; s < plan.splits.size(); ++s) {
        eval::Features train_x, test_x;
        std::vector<std::string> train_y, test_y;
        for (const std::string& id : plan.splits[s].train_ids) {
            train_x.push_back(fx.store["farneback"][id].values);
            train_y.push_back(fx.labels[id]);
        }
        for (const std::string& id : plan.splits[s].test_ids) {
            test_x.push_back(fx.store["farneback"][id].values);
            test_y.push_back(fx.labels[id]);
        }
        eval::LinearSvmModel model = eval::train_linear_svm(train_x, train_y);
        REQUIRE(a.configs[0].per_split_accuracy[s] == eval::accuracy(model, test_x, test_y));
    }
}

TEST_CASE("run_augmentation_experiment: benign augmentation costs at most 1%") {
    Fixture fx = make_fixture(20, 0.05, 9);
    eval::SplitPlan plan = eval::make_splits(fx.ids, fx.label_list, 5, 0.6, 10);
    std::vector<EngineId> pool = {EngineId::tvl1(), EngineId::patchmatch()};
    AugmentationReport report = run_augmentation_experiment(fx.store, fx.labels,
                                                            EngineId::farneback(), pool, plan);
    for (const AugmentationConfigResult& cfg : report.configs)
        REQUIRE(cfg.mean_accuracy >= report.baseline_accuracy - 0.01);
}

TEST_CASE("augmentation markdown: marks every pool engine and bolds the best") {
    Fixture fx = make_fixture();
    eval::SplitPlan plan = eval::make_splits(fx.ids, fx.label_list, 2, 0.6, 11);
    std::vector<EngineId> pool = {EngineId::tvl1()};
    AugmentationReport report = run_augmentation_experiment(fx.store, fx.labels,
                                                            EngineId::farneback(), pool, plan);
    std::ostringstream md;
    write_augmentation_markdown(report, md);
    REQUIRE(md.str().find("tvl1") != std::string::npos);
    REQUIRE(md.str().find("**") != std::string::npos);
}
