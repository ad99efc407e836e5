// Acceptance suite: runs every benchmark commitment end-to-end on generated
// data and prints one pass/fail line per criterion. Criterion 9 needs a
// licensed dataset and is skipped (with a line saying so) when absent.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flowbench/augment/augment.hpp"
#include "flowbench/core/metrics.hpp"
#include "flowbench/core/warp.hpp"
#include "flowbench/descriptors/descriptors.hpp"
#include "flowbench/engines/farneback.hpp"
#include "flowbench/engines/patchmatch.hpp"
#include "flowbench/engines/tvl1.hpp"
#include "flowbench/eval/auc.hpp"
#include "flowbench/harness/bench.hpp"
#include "flowbench/harness/experiment.hpp"
#include "flowbench/preprocess/regions.hpp"
#include "flowbench/synth/dataset_io.hpp"
#include "flowbench/synth/generate.hpp"

using namespace flowbench;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] %d. %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& what, const std::string& why) {
    std::printf("[SKIP] %d. %s (%s)\n", criterion, what.c_str(), why.c_str());
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("flowbench_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// --------------------------------------------------------------------------
// 1. Synthetic flow accuracy + runtime

void criterion_1() {
    const int kSeeds = 10;
    harness::EngineParams params;
    struct EngineCase {
        engines::EngineId id;
        double bound;
    };
    const std::vector<EngineCase> cases = {{engines::EngineId::farneback(), 0.5},
                                           {engines::EngineId::tvl1(), 0.5},
                                           {engines::EngineId::patchmatch(), 1.0}};
    bool pass = true;
    std::string detail;
    for (const EngineCase& c : cases) {
        double epe_sum = 0.0, worst_seconds = 0.0;
        for (int s = 0; s < kSeeds; ++s) {
            synth::SynthSpec spec;
            spec.kind = synth::MotionKind::translation;
            spec.param_a = -3.0 + 6.0 * hash_unit(derive_seed(101, s * 2));
            spec.param_b = -3.0 + 6.0 * hash_unit(derive_seed(101, s * 2 + 1));
            spec.texture_seed = derive_seed(202, s);
            const synth::SynthPair pair = synth::generate_pair(spec);
            const auto t0 = std::chrono::steady_clock::now();
            const FlowField flow =
                harness::compute_native_flow(c.id, pair.prev, pair.next, params);
            const auto t1 = std::chrono::steady_clock::now();
            worst_seconds = std::max(worst_seconds, std::chrono::duration<double>(t1 - t0).count());
            epe_sum += flow_error_interior(flow, pair.gt, 8).mean_epe;
        }
        const double mean_epe = epe_sum / kSeeds;
        const bool ok = mean_epe <= c.bound && worst_seconds < 1.0;
        pass = pass && ok;
        detail += c.id.name() + " EPE " + fmt("%.3f<=%.1f", mean_epe, c.bound) +
                  fmt(", worst %.3fs; ", worst_seconds);
    }
    report(1, pass, "synthetic translation accuracy (10 seeded pairs, interior)", detail);
}

// --------------------------------------------------------------------------
// 2. Discontinuity preservation + seam-band reporting

void criterion_2() {
    const int kSeeds = 10;
    harness::EngineParams params;
    bool pass = true;
    std::string detail;
    for (const engines::EngineId& id : {engines::EngineId::tvl1(), engines::EngineId::patchmatch()}) {
        double inlier_sum = 0.0, seam_epe_sum = 0.0;
        for (int s = 0; s < kSeeds; ++s) {
            synth::SynthSpec spec;
            spec.kind = synth::MotionKind::discontinuity;
            spec.param_a = 2.0;
            spec.texture_seed = derive_seed(303, s);
            const synth::SynthPair pair = synth::generate_pair(spec);
            const FlowField flow =
                harness::compute_native_flow(id, pair.prev, pair.next, params);
            const int seam = spec.width / 2;
            inlier_sum += flow_error_where(flow, pair.gt, [&](int x, int y) {
                              return std::abs(x - seam) > 3 && x >= 8 && y >= 8 &&
                                     x < spec.width - 8 && y < spec.height - 8;
                          }).inlier_fraction_0_5px;
            seam_epe_sum += flow_error_where(flow, pair.gt, [&](int x, int y) {
                                return std::abs(x - seam) <= 3 && y >= 8 && y < spec.height - 8;
                            }).mean_epe;
        }
        const double inliers = inlier_sum / kSeeds;
        pass = pass && inliers >= 0.80;
        detail += id.name() + fmt(" inliers %.3f>=0.80, seam EPE %.2f; ", inliers,
                                  seam_epe_sum / kSeeds);
    }

    // The emitted benchmark report must carry the seam band as its own row.
    harness::BenchOptions opts;
    opts.seeds_per_kind = 2;
    const harness::BenchReport bench = harness::flow_bench({engines::EngineId::tvl1()}, params, opts);
    std::ostringstream csv;
    harness::write_bench_csv(bench, csv);
    const bool seam_reported = csv.str().find("discontinuity_seam") != std::string::npos;
    pass = pass && seam_reported;
    detail += seam_reported ? "seam band reported separately" : "seam band row MISSING";
    report(2, pass, "half-plane discontinuity (+-2 px) outside a 3 px seam band", detail);
}

// --------------------------------------------------------------------------
// 3. Pair-counting AUC equals brute force

void criterion_3() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 50);
    std::uniform_int_distribution<int> quant(1, 10);
    bool pass = true;
    int trials = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> pos(size(rng)), neg(size(rng));
        const int q = quant(rng);
        for (double& v : pos) v = std::floor(score(rng) * q) / q;
        for (double& v : neg) v = std::floor(score(rng) * q) / q;
        double wins = 0.0;
        for (double n : neg)
            for (double p : pos) wins += n < p ? 1.0 : (n == p ? 0.5 : 0.0);
        const double expected = wins / (static_cast<double>(pos.size()) * neg.size());
        if (std::abs(eval::auc(pos, neg) - expected) > 1e-12) {
            pass = false;
            break;
        }
        ++trials;
    }
    const double worked = eval::auc(std::vector<double>{0.8, 0.6}, std::vector<double>{0.7, 0.1});
    pass = pass && worked == 0.75;
    report(3, pass, "rank AUC equals brute-force pair counting",
           fmt("%.0f randomized trials; worked case = %.2f", trials, worked));
}

// --------------------------------------------------------------------------
// 4. Motion-ratio score exactness

void criterion_4() {
    const preprocess::LandmarkSet lm = preprocess::canonical_landmarks(50, 50);
    const preprocess::RegionPartition part = preprocess::region_partition(lm, 50, 50);
    using R = preprocess::RegionPartition::Region;
    auto flow_with = [&](float e, float m, float h) {
        FlowField f(50, 50);
        for (int y = 0; y < 50; ++y)
            for (int x = 0; x < 50; ++x) {
                switch (part.at(x, y)) {
                    case R::dynamic_eyes: f.at(x, y) = {e, 0.0f}; break;
                    case R::dynamic_mouth: f.at(x, y) = {0.0f, m}; break;
                    case R::rigid_head: f.at(x, y) = {h, 0.0f}; break;
                    case R::none: break;
                }
            }
        return f;
    };
    const double f_211 = preprocess::intraface_motion_score(flow_with(2, 1, 1), part).value;
    const double f_zero = preprocess::intraface_motion_score(flow_with(0, 0, 0), part).value;
    const double f_rigid_only = preprocess::intraface_motion_score(flow_with(0, 0, 5), part).value;
    const bool pass = std::abs(f_211 - 3.0) < 1e-12 && f_zero == 0.0 && f_rigid_only == 0.0;
    report(4, pass, "dynamic/rigid motion ratio worked cases",
           fmt("f(2,1,1)=%.12f, f(0,0,0)=%.0f, f(0,0,5)=%.0f", f_211, f_zero, f_rigid_only));
}

// --------------------------------------------------------------------------
// 5. Descriptor contracts

void criterion_5() {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    std::uniform_real_distribution<double> mag(0.3, 3.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    bool lengths_ok = true, shift_ok = true, hoof_ok = true;

    for (int trial = 0; trial < 100; ++trial) {
        FlowField f(50, 50);
        for (auto& v : f.vectors) {
            if (coin(rng) < 0.25) continue;
            const double a = angle(rng), m = mag(rng);
            v = {static_cast<float>(m * std::cos(a)), static_cast<float>(m * std::sin(a))};
        }
        const auto raw = descriptors::raw_flow_vector(f);
        const auto hof = descriptors::hof_descriptor(f);
        const auto hoof = descriptors::hoof_descriptor(f);
        const auto lmp = descriptors::lmp_descriptor(f);
        lengths_ok = lengths_ok && raw.values.size() == 7500 && hof.values.size() == 300 &&
                     hoof.values.size() == 300 && lmp.values.size() == 300;

        // 90-degree vector rotation is exact in floats: the bin shift must be
        // exact; a 30-degree rotation must match within fp tolerance.
        FlowField rot90(50, 50);
        for (size_t i = 0; i < f.pixel_count(); ++i)
            rot90.vectors[i] = {-f.vectors[i].v, f.vectors[i].u};
        const auto hof90 = descriptors::hof_descriptor(rot90);
        for (int cell = 0; cell < 25 && shift_ok; ++cell)
            for (int b = 0; b < 12; ++b)
                if (hof90.values[cell * 12 + (b + 3) % 12] != hof.values[cell * 12 + b]) {
                    shift_ok = false;
                    break;
                }
        const double c30 = std::cos(3.14159265358979323846 / 6.0);
        const double s30 = std::sin(3.14159265358979323846 / 6.0);
        FlowField rot30(50, 50);
        for (size_t i = 0; i < f.pixel_count(); ++i)
            rot30.vectors[i] = {
                static_cast<float>(c30 * f.vectors[i].u - s30 * f.vectors[i].v),
                static_cast<float>(s30 * f.vectors[i].u + c30 * f.vectors[i].v)};
        const auto hof30 = descriptors::hof_descriptor(rot30);
        for (int cell = 0; cell < 25 && shift_ok; ++cell)
            for (int b = 0; b < 12; ++b) {
                const double a = hof.values[cell * 12 + b];
                const double r = hof30.values[cell * 12 + (b + 1) % 12];
                if (std::abs(a - r) > 1e-6 * std::max(1.0, std::abs(a))) {
                    shift_ok = false;
                    break;
                }
            }

        for (int cell = 0; cell < 25; ++cell) {
            double sum = 0.0;
            for (int b = 0; b < 12; ++b) sum += hoof.values[cell * 12 + b];
            if (sum != 0.0 && std::abs(sum - 1.0) > 1e-9) hoof_ok = false;
        }
    }
    const bool pass = lengths_ok && shift_ok && hoof_ok;
    report(5, pass, "descriptor contracts over 100 random flows",
           std::string("lengths 7500/300 ") + (lengths_ok ? "ok" : "BAD") +
               "; rotation bin-shift " + (shift_ok ? "ok" : "BAD") + "; HOOF cell sums " +
               (hoof_ok ? "1 +- 1e-9" : "BAD"));
}

// --------------------------------------------------------------------------
// 6. End-to-end synthetic benchmark

harness::ExperimentResult run_end_to_end(const fs::path& dataset, const fs::path& out, int jobs) {
    harness::ExperimentConfig cfg;
    cfg.dataset_root = dataset;
    cfg.output_dir = out;
    cfg.engine_list = {engines::EngineId::farneback()};
    cfg.descriptor_list = {descriptors::DescriptorId::hof};
    cfg.tim_mode = preprocess::TimMode::tim10;
    cfg.split.c = 10;
    cfg.master_seed = 42;
    cfg.jobs = jobs;
    return harness::run_experiment_and_write(cfg);
}

void criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dataset = fresh_dir("e2e_dataset");
    synth::ExpressionDatasetSpec spec;
    spec.classes = 6;
    spec.sequences_per_class = 8;
    spec.frames_per_sequence = 12;
    spec.seed = 9;
    synth::write_dataset(synth::generate_expression_dataset(spec), dataset, false);

    const harness::ExperimentResult result = run_end_to_end(dataset, fresh_dir("e2e_out"), 2);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    bool pass = result.cells.size() == 1 && result.cells[0].error.empty();
    double auc = 0.0;
    if (pass) {
        auc = result.cells[0].auc.mean;
        pass = auc >= 0.90 && result.cells[0].auc.per_split.size() == 10;
    }
    pass = pass && seconds < 300.0;
    report(6, pass, "end-to-end 6x8x12 benchmark (farneback + hof + TIM10, c=10)",
           fmt("mean macro AUC %.4f>=0.90 in %.1fs<300s", auc, seconds));
}

// --------------------------------------------------------------------------
// 7. Augmentation protocol

void criterion_7() {
    using engines::EngineId;
    bool pass = true;
    std::string detail;

    pass = pass && augment::enumerate_configs(
                       EngineId::farneback(),
                       {EngineId::tvl1(), EngineId::patchmatch(), EngineId::external("a"),
                        EngineId::external("b"), EngineId::external("c")})
                           .size() == 32;

    // Benign scenario: augmenting engines carry the base features plus small
    // noise; accuracy may not fall more than one point below the baseline.
    std::mt19937_64 rng(606);
    std::normal_distribution<double> jitter(0.0, 0.4);
    std::normal_distribution<double> clone_noise(0.0, 0.05);
    augment::FeatureStore store;
    std::map<std::string, std::string> label_by_id;
    std::vector<std::string> ids, labels;
    const std::vector<std::pair<double, double>> centers = {{-3, 0}, {3, 0},  {0, 4},
                                                            {6, 4},  {-6, 4}, {0, -5}};
    for (size_t c = 0; c < centers.size(); ++c)
        for (int i = 0; i < 10; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "c%zu_%02d", c, i);
            descriptors::FeatureVector fv;
            fv.id = descriptors::DescriptorId::hof;
            fv.values = {centers[c].first + jitter(rng), centers[c].second + jitter(rng)};
            store["farneback"][id] = fv;
            for (const char* eng : {"tvl1", "patchmatch"}) {
                descriptors::FeatureVector noisy = fv;
                for (double& v : noisy.values) v += clone_noise(rng);
                store[eng][id] = noisy;
            }
            label_by_id[id] = "class" + std::to_string(c);
            ids.push_back(id);
            labels.push_back(label_by_id[id]);
        }
    const eval::SplitPlan plan = eval::make_splits(ids, labels, 10, 0.6, 7);
    const std::vector<EngineId> pool = {EngineId::tvl1(), EngineId::patchmatch()};
    const augment::AugmentationReport report_aug = augment::run_augmentation_experiment(
        store, label_by_id, EngineId::farneback(), pool, plan);
    pass = pass && report_aug.configs.size() == 4;

    // Leakage invariant re-checked externally for every configuration/split.
    for (const augment::AugmentationConfig& cfg :
         augment::enumerate_configs(EngineId::farneback(), pool)) {
        for (const eval::SplitAssignment& split : plan.splits) {
            const augment::TrainingSet train =
                augment::build_augmented_train(split, cfg, store, label_by_id);
            std::set<std::string> test_ids(split.test_ids.begin(), split.test_ids.end());
            for (const std::string& id : train.ids)
                if (test_ids.count(augment::id_root(id))) pass = false;
            if (train.ids.size() != split.train_ids.size() * (1 + cfg.augmenting_engines.size()))
                pass = false;
        }
    }

    // Baseline bit-match against the plain eval pipeline.
    bool baseline_match = true;
    for (size_t s = 0; s < plan.splits.size(); ++s) {
        eval::Features train_x, test_x;
        std::vector<std::string> train_y, test_y;
        for (const std::string& id : plan.splits[s].train_ids) {
            train_x.push_back(store["farneback"][id].values);
            train_y.push_back(label_by_id[id]);
        }
        for (const std::string& id : plan.splits[s].test_ids) {
            test_x.push_back(store["farneback"][id].values);
            test_y.push_back(label_by_id[id]);
        }
        const eval::LinearSvmModel model = eval::train_linear_svm(train_x, train_y);
        if (eval::accuracy(model, test_x, test_y) != report_aug.configs[0].per_split_accuracy[s])
            baseline_match = false;
    }
    pass = pass && baseline_match;

    double worst_delta = 0.0;
    for (const augment::AugmentationConfigResult& cfg : report_aug.configs)
        worst_delta = std::min(worst_delta, cfg.mean_accuracy - report_aug.baseline_accuracy);
    pass = pass && worst_delta >= -0.01;

    detail = std::string("2^5=32 configs enumerated; leakage clean; baseline ") +
             (baseline_match ? "bit-matches" : "MISMATCH") +
             fmt("; worst benign delta %+.4f>=-0.01", worst_delta) +
             " (the reference 3-6% dataset gains need the restricted datasets)";
    report(7, pass, "cross-flow augmentation protocol", detail);
}

// --------------------------------------------------------------------------
// 8. Determinism across runs and job counts

void criterion_8() {
    const fs::path dataset = fresh_dir("det_dataset");
    synth::ExpressionDatasetSpec spec;
    spec.classes = 6;
    spec.sequences_per_class = 2;
    spec.frames_per_sequence = 10;
    spec.seed = 21;
    synth::write_dataset(synth::generate_expression_dataset(spec), dataset, false);

    const fs::path out1 = fresh_dir("det_out_jobs1");
    const fs::path out8 = fresh_dir("det_out_jobs8");
    const fs::path out1b = fresh_dir("det_out_jobs1_again");
    run_end_to_end(dataset, out1, 1);
    run_end_to_end(dataset, out8, 8);
    run_end_to_end(dataset, out1b, 1);

    bool pass = true;
    std::string diff;
    for (const char* name :
         {"auc_report.csv", "accuracy_report.csv", "summary.md", "manifest.json"}) {
        if (slurp(out1 / name) != slurp(out8 / name) ||
            slurp(out1 / name) != slurp(out1b / name)) {
            pass = false;
            diff += std::string(name) + " differs; ";
        }
    }
    report(8, pass, "byte-identical bundles (rerun and --jobs 1 vs --jobs 8)",
           pass ? "all bundle files identical" : diff);
}

// --------------------------------------------------------------------------
// 9. Conditional licensed-dataset reproduction

void criterion_9() {
    const char* root_env = std::getenv("FLOWBENCH_CKPLUS_ROOT");
    if (!root_env || !fs::is_directory(root_env)) {
        report_skip(9, "licensed-dataset ranking (farneback, tvl1 above imported pwcnet)",
                    "set FLOWBENCH_CKPLUS_ROOT to a licensed dataset with landmarks to enable");
        return;
    }
    const char* flows_env = std::getenv("FLOWBENCH_EXTERNAL_FLOW_ROOT");
    harness::ExperimentConfig cfg;
    cfg.dataset_root = root_env;
    cfg.output_dir = fresh_dir("ckplus_out");
    if (flows_env) cfg.external_flow_root = flows_env;
    cfg.engine_list = {engines::EngineId::farneback(), engines::EngineId::tvl1(),
                       engines::EngineId::external("pwcnet")};
    cfg.descriptor_list = {descriptors::DescriptorId::raw};
    cfg.tim_mode = preprocess::TimMode::tim2;
    cfg.split.c = 10;
    cfg.master_seed = 42;
    cfg.jobs = 2;
    const harness::ExperimentResult result = harness::run_experiment_and_write(cfg);
    std::map<std::string, double> auc_by_engine;
    for (const harness::CellResult& cell : result.cells) {
        if (!cell.error.empty()) {
            report(9, false, "licensed-dataset ranking",
                   "cell " + cell.engine + " failed: " + cell.error);
            return;
        }
        auc_by_engine[cell.engine] = cell.auc.mean;
    }
    const bool pass = auc_by_engine["farneback"] > auc_by_engine["pwcnet"] &&
                      auc_by_engine["tvl1"] > auc_by_engine["pwcnet"];
    report(9, pass, "licensed-dataset ranking (ordering only)",
           fmt("farneback %.3f, tvl1 %.3f vs pwcnet %.3f", auc_by_engine["farneback"],
               auc_by_engine["tvl1"], auc_by_engine["pwcnet"]));
}

} // namespace

int main() {
    std::printf("flowbench acceptance suite\n==========================\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("==========================\n%s (%d failure(s))\n",
                g_failures == 0 ? "ALL CRITERIA SATISFIED" : "FAILURES PRESENT", g_failures);
    return g_failures == 0 ? 0 : 1;
}
