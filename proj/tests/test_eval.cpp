#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "flowbench/eval/auc.hpp"
#include "flowbench/eval/splits.hpp"
#include "flowbench/eval/svm.hpp"

using namespace flowbench;
using namespace flowbench::eval;

namespace {

/// Linearly separable planar clusters around per-class centers.
struct Toy {
    Features x;
    std::vector<std::string> y;
};

Toy separable_toy(const std::vector<std::pair<double, double>>& centers, int per_class,
                  double radius, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-radius, radius);
    Toy toy;
    for (size_t c = 0; c < centers.size(); ++c)
        for (int i = 0; i < per_class; ++i) {
            toy.x.push_back({centers[c].first + jitter(rng), centers[c].second + jitter(rng)});
            toy.y.push_back("class" + std::to_string(c));
        }
    return toy;
}

double brute_force_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
    double wins = 0.0;
    for (double n : neg)
        for (double p : pos) {
            if (n < p)
                wins += 1.0;
            else if (n == p)
                wins += 0.5;
        }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

} // namespace

TEST_CASE("make_splits: 100 ids at 60-40 over ten configurations") {
    std::vector<std::string> ids, labels;
    for (int i = 0; i < 100; ++i) {
        ids.push_back("s" + std::to_string(i));
        labels.push_back("c" + std::to_string(i % 5));
    }
    SplitPlan plan = make_splits(ids, labels, 10, 0.6, 42);
    REQUIRE(plan.splits.size() == 10);
    REQUIRE(plan.seeds.size() == 10);
    REQUIRE(std::set<uint64_t>(plan.seeds.begin(), plan.seeds.end()).size() == 10);
    for (const SplitAssignment& s : plan.splits) {
        REQUIRE(s.train_ids.size() == 60);
        REQUIRE(s.test_ids.size() == 40);
    }
}

TEST_CASE("make_splits: deterministic from the master seed") {
    std::vector<std::string> ids, labels;
    for (int i = 0; i < 30; ++i) {
        ids.push_back("s" + std::to_string(i));
        labels.push_back(i % 2 ? "a" : "b");
    }
    SplitPlan a = make_splits(ids, labels, 10, 0.6, 7);
    SplitPlan b = make_splits(ids, labels, 10, 0.6, 7);
    for (int i = 0; i < 10; ++i) {
        REQUIRE(a.splits[i].train_ids == b.splits[i].train_ids);
        REQUIRE(a.splits[i].test_ids == b.splits[i].test_ids);
    }
    SplitPlan c = make_splits(ids, labels, 10, 0.6, 8);
    bool any_difference = false;
    for (int i = 0; i < 10; ++i) any_difference |= a.splits[i].train_ids != c.splits[i].train_ids;
    REQUIRE(any_difference);
}

TEST_CASE("make_splits: tiny balanced case stratifies one per side") {
    const std::vector<std::string> ids = {"s0", "s1", "s2", "s3"};
    const std::vector<std::string> labels = {"a", "a", "b", "b"};
    SplitPlan plan = make_splits(ids, labels, 5, 0.5, 1);
    for (const SplitAssignment& s : plan.splits) {
        REQUIRE(s.train_ids.size() == 2);
        auto has = [](const std::vector<std::string>& v, const std::string& p) {
            return std::count_if(v.begin(), v.end(),
                                 [&](const std::string& id) { return id.rfind(p, 0) == 0; });
        };
        REQUIRE((has(s.train_ids, "s0") + has(s.train_ids, "s1")) == 1);
        REQUIRE((has(s.test_ids, "s2") + has(s.test_ids, "s3")) == 1);
    }
}

TEST_CASE("make_splits: partition and quota properties") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 10 + static_cast<int>(rng() % 60);
        std::vector<std::string> ids, labels;
        for (int i = 0; i < n; ++i) {
            ids.push_back("id" + std::to_string(i));
            labels.push_back("c" + std::to_string(i % 3));
        }
        const double ratio = 0.3 + 0.4 * (static_cast<double>(rng() % 100) / 100.0);
        SplitPlan plan = make_splits(ids, labels, 3, ratio, rng());
        for (const SplitAssignment& s : plan.splits) {
            REQUIRE(s.train_ids.size() ==
                    static_cast<size_t>(std::llround(ratio * static_cast<double>(n))));
            std::set<std::string> all(s.train_ids.begin(), s.train_ids.end());
            for (const std::string& id : s.test_ids) REQUIRE(all.insert(id).second);
            REQUIRE(all.size() == ids.size());
        }
    }
}

TEST_CASE("make_splits: undersized classes are a protocol error") {
    const std::vector<std::string> ids = {"a1", "a2", "a3", "a4", "b1"};
    const std::vector<std::string> labels = {"a", "a", "a", "a", "b"};
    REQUIRE_THROWS_AS(make_splits(ids, labels, 3, 0.6, 0), ProtocolError);
}

TEST_CASE("svm: separable two-class toy reaches training accuracy 1 and zero hinge loss") {
    Toy toy = separable_toy({{-2.0, 0.0}, {2.0, 0.0}}, 20, 0.5, 11);
    LinearSvmModel model = train_linear_svm(toy.x, toy.y);
    REQUIRE(accuracy(model, toy.x, toy.y) == 1.0);
    const BinaryLinearModel& m = model.pair_models[0];
    for (size_t i = 0; i < toy.x.size(); ++i) {
        const double y = toy.y[i] == "class0" ? 1.0 : -1.0;
        REQUIRE(y * m.margin(toy.x[i]) >= 1.0 - 1e-6);
    }
}

TEST_CASE("svm: duplicating every training point keeps the decision function") {
    Toy toy = separable_toy({{-2.0, 0.0}, {2.0, 0.0}}, 15, 0.5, 12);
    Toy doubled;
    doubled.x = toy.x;
    doubled.y = toy.y;
    doubled.x.insert(doubled.x.end(), toy.x.begin(), toy.x.end());
    doubled.y.insert(doubled.y.end(), toy.y.begin(), toy.y.end());

    SvmTrainOptions tight;
    tight.tolerance = 1e-10;
    tight.max_epochs = 20000;
    LinearSvmModel a = train_linear_svm(toy.x, toy.y, tight);
    LinearSvmModel b = train_linear_svm(doubled.x, doubled.y, tight);
    for (size_t d = 0; d < 2; ++d)
        REQUIRE(a.pair_models[0].weights[d] ==
                Catch::Approx(b.pair_models[0].weights[d]).margin(1e-6));
    REQUIRE(a.pair_models[0].bias == Catch::Approx(b.pair_models[0].bias).margin(1e-6));
}

TEST_CASE("svm: training is deterministic") {
    Toy toy = separable_toy({{-2.0, 0.0}, {2.0, 0.0}, {0.0, 3.0}}, 12, 0.5, 13);
    LinearSvmModel a = train_linear_svm(toy.x, toy.y);
    LinearSvmModel b = train_linear_svm(toy.x, toy.y);
    for (size_t p = 0; p < a.pair_models.size(); ++p) {
        REQUIRE(a.pair_models[p].weights == b.pair_models[p].weights);
        REQUIRE(a.pair_models[p].bias == b.pair_models[p].bias);
    }
}

TEST_CASE("svm: dual objective is non-increasing across epochs") {
    Toy toy = separable_toy({{-1.0, 0.0}, {1.0, 0.5}}, 25, 0.8, 14);
    SvmTrainTrace trace;
    SvmTrainOptions opts;
    opts.tolerance = 1e-9;
    train_linear_svm(toy.x, toy.y, opts, &trace);
    REQUIRE(trace.dual_objective_per_epoch.size() >= 2);
    for (size_t e = 1; e < trace.dual_objective_per_epoch.size(); ++e)
        REQUIRE(trace.dual_objective_per_epoch[e] <=
                trace.dual_objective_per_epoch[e - 1] + 1e-12);
    REQUIRE(trace.final_gap < 1e-9);
}

TEST_CASE("svm: single-class input is a protocol error") {
    Features x = {{0.0, 1.0}, {1.0, 0.0}};
    std::vector<std::string> y = {"only", "only"};
    REQUIRE_THROWS_AS(train_linear_svm(x, y), ProtocolError);
}

TEST_CASE("predict: training exemplars classify to their own class") {
    Toy toy = separable_toy({{-3.0, 0.0}, {3.0, 0.0}, {0.0, 4.0}}, 10, 0.5, 15);
    LinearSvmModel model = train_linear_svm(toy.x, toy.y);
    for (size_t i = 0; i < toy.x.size(); ++i) REQUIRE(predict(model, toy.x[i]) == toy.y[i]);
}

TEST_CASE("predict: symmetric midpoint resolves deterministically") {
    Features x = {{-1.0, 0.0}, {-1.0, 0.1}, {1.0, 0.0}, {1.0, 0.1}};
    std::vector<std::string> y = {"left", "left", "right", "right"};
    LinearSvmModel model = train_linear_svm(x, y);
    const std::vector<double> mid = {0.0, 0.05};
    const std::string p1 = predict(model, mid);
    const std::string p2 = predict(model, mid);
    REQUIRE(p1 == p2);
    REQUIRE((p1 == "left" || p1 == "right"));
}

TEST_CASE("predict: three-class vote matches an exhaustive recount") {
    Toy toy = separable_toy({{-3.0, -1.0}, {3.0, -1.0}, {0.0, 3.0}}, 8, 0.6, 16);
    LinearSvmModel model = train_linear_svm(toy.x, toy.y);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coord(-4.0, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> pt = {coord(rng), coord(rng)};
        std::vector<int> votes(model.classes.size(), 0);
        std::vector<double> margin_sum(model.classes.size(), 0.0);
        size_t p = 0;
        for (size_t i = 0; i < model.classes.size(); ++i)
            for (size_t j = i + 1; j < model.classes.size(); ++j, ++p) {
                const double f = model.pair_models[p].margin(pt);
                (f >= 0.0 ? votes[i] : votes[j]) += 1;
                margin_sum[i] += f;
                margin_sum[j] -= f;
            }
        size_t best = 0;
        for (size_t k = 1; k < votes.size(); ++k)
            if (votes[k] > votes[best] ||
                (votes[k] == votes[best] && margin_sum[k] > margin_sum[best]))
                best = k;
        REQUIRE(predict(model, pt) == model.classes[best]);
    }
}

TEST_CASE("auc: worked examples") {
    REQUIRE(auc(std::vector<double>{1.0}, std::vector<double>{0.0}) == 1.0);
    REQUIRE(auc(std::vector<double>{0.8, 0.6}, std::vector<double>{0.7, 0.1}) == 0.75);
    REQUIRE(auc(std::vector<double>{0.5}, std::vector<double>{0.5}) == 0.5);
    REQUIRE_THROWS_AS(auc(std::vector<double>{}, std::vector<double>{0.1}), ProtocolError);
}

TEST_CASE("auc: matches brute-force pair counting") {
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 50);
    std::uniform_int_distribution<int> quant(1, 8);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> pos(size(rng)), neg(size(rng));
        const int q = quant(rng); // coarse quantization provokes ties
        for (double& v : pos) v = std::floor(score(rng) * q) / q;
        for (double& v : neg) v = std::floor(score(rng) * q) / q;
        REQUIRE(auc(pos, neg) == Catch::Approx(brute_force_auc(pos, neg)).epsilon(1e-12));
    }
}

TEST_CASE("auc: invariant under strictly increasing transforms") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> score(-2.0, 2.0);
    std::vector<double> pos(20), neg(25);
    for (double& v : pos) v = score(rng);
    for (double& v : neg) v = score(rng);
    const double base = auc(pos, neg);
    auto transform = [](double v) { return std::exp(3.0 * v) - 7.0; };
    for (double& v : pos) v = transform(v);
    for (double& v : neg) v = transform(v);
    REQUIRE(auc(pos, neg) == Catch::Approx(base).epsilon(1e-12));
}

TEST_CASE("mean_auc: worked examples and scalar oracle") {
    AucReport r1 = mean_auc(std::vector<double>{0.8, 0.8, 0.8});
    REQUIRE(r1.mean == Catch::Approx(0.8).margin(1e-12));
    REQUIRE(r1.std_dev == Catch::Approx(0.0).margin(1e-12));

    AucReport r2 = mean_auc(std::vector<double>{1.0, 0.0});
    REQUIRE(r2.mean == 0.5);

    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::vector<double> vals(10);
    for (double& v : vals) v = score(rng);
    AucReport r3 = mean_auc(vals);
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= 10.0;
    double sq = 0.0;
    for (double v : vals) sq += (v - mean) * (v - mean);
    REQUIRE(r3.mean == Catch::Approx(mean).margin(1e-12));
    REQUIRE(r3.std_dev == Catch::Approx(std::sqrt(sq / 9.0)).margin(1e-12));
}

TEST_CASE("multiclass_auc: separable toy reaches macro 1.0") {
    Toy toy = separable_toy({{-4.0, 0.0}, {4.0, 0.0}, {0.0, 5.0}}, 10, 0.5, 21);
    LinearSvmModel model = train_linear_svm(toy.x, toy.y);
    MulticlassAucResult r = multiclass_auc(model, toy.x, toy.y);
    REQUIRE(r.macro == 1.0);
    REQUIRE(r.warnings.empty());
}

TEST_CASE("multiclass_auc: constant scores give 0.5 per class") {
    Toy toy = separable_toy({{-2.0, 0.0}, {2.0, 0.0}}, 10, 0.5, 22);
    LinearSvmModel model = train_linear_svm(toy.x, toy.y);
    for (BinaryLinearModel& m : model.pair_models) { // degrade to a constant predictor
        m.weights.assign(m.weights.size(), 0.0);
        m.bias = 0.3;
    }
    MulticlassAucResult r = multiclass_auc(model, toy.x, toy.y);
    for (double v : r.per_class) REQUIRE(v == 0.5);
}

TEST_CASE("multiclass_auc: matches per-class brute force") {
    Toy toy = separable_toy({{-2.0, 0.0}, {2.0, 1.0}, {0.0, -3.0}}, 7, 1.5, 23);
    LinearSvmModel model = train_linear_svm(toy.x, toy.y);
    MulticlassAucResult r = multiclass_auc(model, toy.x, toy.y);
    for (size_t k = 0; k < r.classes.size(); ++k) {
        std::vector<double> pos, neg;
        for (size_t s = 0; s < toy.x.size(); ++s) {
            const std::vector<double> scores = decision_scores(model, toy.x[s]);
            const size_t idx = static_cast<size_t>(
                std::find(model.classes.begin(), model.classes.end(), r.classes[k]) -
                model.classes.begin());
            (toy.y[s] == r.classes[k] ? pos : neg).push_back(scores[idx]);
        }
        REQUIRE(r.per_class[k] == Catch::Approx(brute_force_auc(pos, neg)).epsilon(1e-12));
    }
}

TEST_CASE("multiclass_auc: absent class is skipped with a warning") {
    Toy toy = separable_toy({{-3.0, 0.0}, {3.0, 0.0}, {0.0, 4.0}}, 8, 0.5, 24);
    LinearSvmModel model = train_linear_svm(toy.x, toy.y);
    Features test_x;
    std::vector<std::string> test_y;
    for (size_t i = 0; i < toy.x.size(); ++i)
        if (toy.y[i] != "class2") {
            test_x.push_back(toy.x[i]);
            test_y.push_back(toy.y[i]);
        }
    MulticlassAucResult r = multiclass_auc(model, test_x, test_y);
    REQUIRE(r.warnings.size() == 1);
    REQUIRE(r.classes.size() == 2);
}

TEST_CASE("accuracy: exact fractions") {
    Toy toy = separable_toy({{-3.0, 0.0}, {3.0, 0.0}}, 2, 0.2, 25);
    LinearSvmModel model = train_linear_svm(toy.x, toy.y);
    REQUIRE(accuracy(model, toy.x, toy.y) == 1.0);

    std::vector<std::string> wrong = {"class1", "class1", "class0", "class0"};
    REQUIRE(accuracy(model, toy.x, wrong) == 0.0);

    std::vector<std::string> mixed = {"class0", "class0", "class1", "class0"};
    REQUIRE(accuracy(model, toy.x, mixed) == 0.75);
}

TEST_CASE("svm model: json roundtrip preserves the decision function") {
    namespace fs = std::filesystem;
    Toy toy = separable_toy({{-2.0, 1.0}, {2.0, -1.0}, {0.0, 3.0}}, 6, 0.5, 26);
    LinearSvmModel model = train_linear_svm(toy.x, toy.y);
    const fs::path p = fs::temp_directory_path() / "flowbench_svm_test.json";
    save_svm_model(model, p);
    LinearSvmModel back = load_svm_model(p);
    for (size_t i = 0; i < toy.x.size(); ++i) {
        REQUIRE(predict(back, toy.x[i]) == predict(model, toy.x[i]));
        REQUIRE(decision_scores(back, toy.x[i]) == decision_scores(model, toy.x[i]));
    }
    nlohmann::json bad = svm_model_to_json(model);
    bad["version"] = "other";
    REQUIRE_THROWS_AS(svm_model_from_json(bad), FormatError);
}
