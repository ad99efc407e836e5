#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "flowbench/core/rng.hpp"
#include "flowbench/error.hpp"

namespace flowbench::eval {

struct SplitAssignment {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

/// c stratified train/test configurations, regenerable from the master seed
/// (sub-seed i = derive_seed(master, i)).
struct SplitPlan {
    int c = 10;
    double ratio = 0.6;
    uint64_t master_seed = 0;
    std::vector<uint64_t> seeds;
    std::vector<SplitAssignment> splits;
};

inline SplitPlan make_splits(const std::vector<std::string>& ids,
                             const std::vector<std::string>& labels, int c = 10,
                             double ratio = 0.6, uint64_t master_seed = 0) {
    if (ids.size() != labels.size())
        throw InvalidInput("make_splits: ids/labels size mismatch");
    if (ids.size() < 4) throw InvalidInput("make_splits: need at least 4 samples");
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("make_splits: ratio must lie in (0,1)");
    if (c < 1) throw InvalidInput("make_splits: c must be >= 1");
    if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size())
        throw InvalidInput("make_splits: duplicate sample ids");

    // Canonical per-class member lists, ordered by (label, id).
    std::map<std::string, std::vector<std::string>> by_class;
    for (size_t i = 0; i < ids.size(); ++i) by_class[labels[i]].push_back(ids[i]);
    for (auto& [label, members] : by_class) {
        if (members.size() < 2)
            throw ProtocolError("make_splits: class '" + label + "' has fewer than 2 members");
        std::sort(members.begin(), members.end());
    }

    // Largest-remainder allocation of round(ratio * N) train slots per class.
    const long long total_train = std::llround(ratio * static_cast<double>(ids.size()));
    std::map<std::string, size_t> train_quota;
    std::vector<std::pair<double, std::string>> remainders;
    long long assigned = 0;
    for (const auto& [label, members] : by_class) {
        const double target = ratio * static_cast<double>(members.size());
        const size_t base = static_cast<size_t>(std::floor(target));
        train_quota[label] = base;
        assigned += static_cast<long long>(base);
        remainders.emplace_back(-(target - base), label); // ascending = largest first
    }
    std::sort(remainders.begin(), remainders.end());
    for (size_t k = 0; assigned < total_train && k < remainders.size(); ++k, ++assigned)
        ++train_quota[remainders[k].second];

    SplitPlan plan;
    plan.c = c;
    plan.ratio = ratio;
    plan.master_seed = master_seed;
    for (int i = 0; i < c; ++i) {
        const uint64_t seed = derive_seed(master_seed, static_cast<uint64_t>(i));
        plan.seeds.push_back(seed);
        std::mt19937_64 rng(seed);
        SplitAssignment split;
        for (const auto& [label, members] : by_class) {
            std::vector<std::string> shuffled = members;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            const size_t k = train_quota[label];
            split.train_ids.insert(split.train_ids.end(), shuffled.begin(), shuffled.begin() + k);
            split.test_ids.insert(split.test_ids.end(), shuffled.begin() + k, shuffled.end());
        }
        std::sort(split.train_ids.begin(), split.train_ids.end());
        std::sort(split.test_ids.begin(), split.test_ids.end());
        plan.splits.push_back(std::move(split));
    }
    return plan;
}

} // namespace flowbench::eval
