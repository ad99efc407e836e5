#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "flowbench/error.hpp"
#include "flowbench/eval/svm.hpp"

namespace flowbench::eval {

/// Pair-counting AUC (probability a positive outranks a negative), computed
/// as a midrank statistic in O(n log n); ties count one half.
inline double auc(std::span<const double> positives, std::span<const double> negatives) {
    if (positives.empty() || negatives.empty())
        throw ProtocolError("auc: both score sets must be non-empty");
    struct Entry {
        double score;
        bool positive;
    };
    std::vector<Entry> all;
    all.reserve(positives.size() + negatives.size());
    for (double s : positives) {
        if (!std::isfinite(s)) throw InvalidInput("auc: non-finite score");
        all.push_back({s, true});
    }
    for (double s : negatives) {
        if (!std::isfinite(s)) throw InvalidInput("auc: non-finite score");
        all.push_back({s, false});
    }
    std::sort(all.begin(), all.end(),
              [](const Entry& a, const Entry& b) { return a.score < b.score; });

    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < all.size()) {
        size_t j = i;
        while (j < all.size() && all[j].score == all[i].score) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // ranks are 1-based
        for (size_t k = i; k < j; ++k)
            if (all[k].positive) rank_sum_pos += midrank;
        i = j;
    }
    const double n1 = static_cast<double>(positives.size());
    const double n0 = static_cast<double>(negatives.size());
    return (rank_sum_pos - n1 * (n1 + 1.0) / 2.0) / (n0 * n1);
}

/// Mean and sample standard deviation over the split AUCs.
struct AucReport {
    std::vector<double> per_split;
    double mean = 0.0;
    double std_dev = 0.0;
};

inline AucReport mean_auc(std::span<const double> per_split_aucs) {
    if (per_split_aucs.empty()) throw InvalidInput("mean_auc: needs at least one value");
    AucReport r;
    r.per_split.assign(per_split_aucs.begin(), per_split_aucs.end());
    double sum = 0.0;
    for (double v : per_split_aucs) sum += v;
    r.mean = sum / static_cast<double>(per_split_aucs.size());
    if (per_split_aucs.size() > 1) {
        double sq = 0.0;
        for (double v : per_split_aucs) sq += (v - r.mean) * (v - r.mean);
        r.std_dev = std::sqrt(sq / static_cast<double>(per_split_aucs.size() - 1));
    }
    return r;
}

struct MulticlassAucResult {
    std::vector<std::string> classes;   // classes actually scored
    std::vector<double> per_class;      // one-vs-rest AUC per scored class
    double macro = 0.0;
    std::vector<std::string> warnings;  // skipped classes
};

/// One-vs-rest AUC per class from the model's per-class decision scores;
/// micro mode pools every (sample, class) pair into a single statistic.
inline MulticlassAucResult multiclass_auc(const LinearSvmModel& model, const Features& features,
                                          const std::vector<std::string>& labels,
                                          bool micro = false) {
    if (features.size() != labels.size() || features.empty())
        throw InvalidInput("multiclass_auc: features/labels mismatch or empty");
    if (std::set<std::string>(labels.begin(), labels.end()).size() < 2)
        throw ProtocolError("multiclass_auc: test set must cover at least 2 classes");

    std::vector<std::vector<double>> scores;
    scores.reserve(features.size());
    for (const auto& f : features) scores.push_back(decision_scores(model, f));

    MulticlassAucResult out;
    std::vector<double> micro_pos, micro_neg;
    for (size_t k = 0; k < model.classes.size(); ++k) {
        std::vector<double> pos, neg;
        for (size_t s = 0; s < labels.size(); ++s) {
            (labels[s] == model.classes[k] ? pos : neg).push_back(scores[s][k]);
        }
        if (pos.empty()) {
            out.warnings.push_back("class '" + model.classes[k] + "' absent from the test set");
            continue;
        }
        if (neg.empty()) {
            out.warnings.push_back("class '" + model.classes[k] + "' has no negatives in the test set");
            continue;
        }
        out.classes.push_back(model.classes[k]);
        out.per_class.push_back(auc(pos, neg));
        micro_pos.insert(micro_pos.end(), pos.begin(), pos.end());
        micro_neg.insert(micro_neg.end(), neg.begin(), neg.end());
    }
    if (out.per_class.empty()) throw ProtocolError("multiclass_auc: no class could be scored");
    if (micro) {
        out.macro = auc(micro_pos, micro_neg);
    } else {
        double sum = 0.0;
        for (double v : out.per_class) sum += v;
        out.macro = sum / static_cast<double>(out.per_class.size());
    }
    return out;
}

inline double accuracy(const LinearSvmModel& model, const Features& features,
                       const std::vector<std::string>& labels) {
    if (features.size() != labels.size() || features.empty())
        throw InvalidInput("accuracy: features/labels mismatch or empty");
    size_t correct = 0;
    for (size_t s = 0; s < features.size(); ++s)
        correct += predict(model, features[s]) == labels[s];
    return static_cast<double>(correct) / static_cast<double>(features.size());
}

} // namespace flowbench::eval
