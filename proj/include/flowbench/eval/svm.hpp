#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowbench/error.hpp"

namespace flowbench::eval {

using Features = std::vector<std::vector<double>>;

struct BinaryLinearModel {
    std::string positive;
    std::string negative;
    std::vector<double> weights;
    double bias = 0.0;

    double margin(std::span<const double> x) const {
        double acc = bias;
        for (size_t i = 0; i < weights.size(); ++i) acc += weights[i] * x[i];
        return acc;
    }
};

/// One-vs-one C-SVC with linear kernels; pairwise models ordered by
/// (positive, negative) class index, positive < negative.
struct LinearSvmModel {
    std::vector<std::string> classes;
    double C = 1.0;
    size_t feature_dim = 0;
    std::vector<BinaryLinearModel> pair_models;
};

struct SvmTrainOptions {
    double C = 1.0;
    double tolerance = 1e-3; // absolute duality gap
    int max_epochs = 1000;
};

struct SvmTrainTrace {
    std::vector<double> dual_objective_per_epoch; // 0.5 w.w - sum(alpha), minimization form
    double final_gap = 0.0;
};

namespace detail {

/// Dual coordinate descent for the L2-regularized L1-loss (hinge) binary SVM.
/// The bias rides along as an appended constant-1 feature. y in {+1,-1}.
inline BinaryLinearModel train_binary_dcd(const Features& x, const std::vector<int>& y,
                                          const SvmTrainOptions& opts,
                                          SvmTrainTrace* trace = nullptr) {
    const size_t n = x.size();
    const size_t dim = x.front().size();
    std::vector<double> w(dim + 1, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> qii(n);
    for (size_t i = 0; i < n; ++i) {
        double q = 1.0; // the bias feature
        for (double v : x[i]) q += v * v;
        qii[i] = q;
    }

    double gap = 0.0;
    for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
        for (size_t i = 0; i < n; ++i) {
            double wx = w[dim];
            for (size_t d = 0; d < dim; ++d) wx += w[d] * x[i][d];
            const double grad = y[i] * wx - 1.0;
            if ((alpha[i] <= 0.0 && grad >= 0.0) || (alpha[i] >= opts.C && grad <= 0.0)) continue;
            const double next = std::clamp(alpha[i] - grad / qii[i], 0.0, opts.C);
            const double step = (next - alpha[i]) * y[i];
            if (step == 0.0) continue;
            for (size_t d = 0; d < dim; ++d) w[d] += step * x[i][d];
            w[dim] += step;
            alpha[i] = next;
        }

        double norm2 = 0.0, hinge = 0.0, alpha_sum = 0.0;
        for (double v : w) norm2 += v * v;
        for (size_t i = 0; i < n; ++i) {
            double wx = w[dim];
            for (size_t d = 0; d < dim; ++d) wx += w[d] * x[i][d];
            hinge += std::max(0.0, 1.0 - y[i] * wx);
            alpha_sum += alpha[i];
        }
        const double primal = 0.5 * norm2 + opts.C * hinge;
        const double dual = alpha_sum - 0.5 * norm2;
        gap = primal - dual;
        if (trace) trace->dual_objective_per_epoch.push_back(0.5 * norm2 - alpha_sum);
        if (gap < opts.tolerance) break;
    }
    if (trace) trace->final_gap = gap;

    BinaryLinearModel m;
    m.weights.assign(w.begin(), w.begin() + dim);
    m.bias = w[dim];
    return m;
}

} // namespace detail

inline LinearSvmModel train_linear_svm(const Features& features,
                                       const std::vector<std::string>& labels,
                                       const SvmTrainOptions& opts = {},
                                       SvmTrainTrace* trace = nullptr) {
    if (features.size() != labels.size() || features.empty())
        throw InvalidInput("train_linear_svm: features/labels mismatch or empty");
    const size_t dim = features.front().size();
    for (const auto& f : features)
        if (f.size() != dim) throw InvalidInput("train_linear_svm: inconsistent feature lengths");

    LinearSvmModel model;
    model.C = opts.C;
    model.feature_dim = dim;
    {
        std::set<std::string> unique(labels.begin(), labels.end());
        model.classes.assign(unique.begin(), unique.end());
    }
    if (model.classes.size() < 2)
        throw ProtocolError("train_linear_svm: needs at least 2 classes");

    for (size_t i = 0; i < model.classes.size(); ++i) {
        for (size_t j = i + 1; j < model.classes.size(); ++j) {
            Features x;
            std::vector<int> y;
            for (size_t s = 0; s < features.size(); ++s) {
                if (labels[s] == model.classes[i]) {
                    x.push_back(features[s]);
                    y.push_back(+1);
                } else if (labels[s] == model.classes[j]) {
                    x.push_back(features[s]);
                    y.push_back(-1);
                }
            }
            BinaryLinearModel m = detail::train_binary_dcd(x, y, opts, trace);
            m.positive = model.classes[i];
            m.negative = model.classes[j];
            model.pair_models.push_back(std::move(m));
        }
    }
    return model;
}

/// Per-class score: sum of signed margins of that class's pairwise models.
inline std::vector<double> decision_scores(const LinearSvmModel& model,
                                           std::span<const double> x) {
    if (x.size() != model.feature_dim)
        throw InvalidInput("decision_scores: feature length " + std::to_string(x.size()) +
                           " does not match model dim " + std::to_string(model.feature_dim));
    std::vector<double> scores(model.classes.size(), 0.0);
    size_t p = 0;
    for (size_t i = 0; i < model.classes.size(); ++i)
        for (size_t j = i + 1; j < model.classes.size(); ++j, ++p) {
            const double f = model.pair_models[p].margin(x);
            scores[i] += f;
            scores[j] -= f;
        }
    return scores;
}

/// Majority vote over the pairwise models; ties resolved by summed signed
/// margins, then class order.
inline std::string predict(const LinearSvmModel& model, std::span<const double> x) {
    if (x.size() != model.feature_dim)
        throw InvalidInput("predict: feature length does not match model dim");
    std::vector<int> votes(model.classes.size(), 0);
    std::vector<double> margins(model.classes.size(), 0.0);
    size_t p = 0;
    for (size_t i = 0; i < model.classes.size(); ++i)
        for (size_t j = i + 1; j < model.classes.size(); ++j, ++p) {
            const double f = model.pair_models[p].margin(x);
            if (f >= 0.0)
                ++votes[i];
            else
                ++votes[j];
            margins[i] += f;
            margins[j] -= f;
        }
    size_t best = 0;
    for (size_t k = 1; k < model.classes.size(); ++k) {
        if (votes[k] > votes[best] || (votes[k] == votes[best] && margins[k] > margins[best]))
            best = k;
    }
    return model.classes[best];
}

inline constexpr const char* kSvmModelVersion = "linear-svm-v1";

inline nlohmann::json svm_model_to_json(const LinearSvmModel& model) {
    nlohmann::json doc;
    doc["version"] = kSvmModelVersion;
    doc["classes"] = model.classes;
    doc["C"] = model.C;
    doc["feature_dim"] = model.feature_dim;
    nlohmann::json pairs = nlohmann::json::array();
    for (const BinaryLinearModel& m : model.pair_models)
        pairs.push_back({{"positive", m.positive},
                         {"negative", m.negative},
                         {"bias", m.bias},
                         {"weights", m.weights}});
    doc["pair_models"] = std::move(pairs);
    return doc;
}

inline LinearSvmModel svm_model_from_json(const nlohmann::json& doc) {
    if (!doc.contains("version") || doc["version"] != kSvmModelVersion)
        throw FormatError("svm model: missing or unsupported version tag");
    LinearSvmModel model;
    model.classes = doc["classes"].get<std::vector<std::string>>();
    model.C = doc["C"].get<double>();
    model.feature_dim = doc["feature_dim"].get<size_t>();
    for (const auto& p : doc["pair_models"]) {
        BinaryLinearModel m;
        m.positive = p["positive"].get<std::string>();
        m.negative = p["negative"].get<std::string>();
        m.bias = p["bias"].get<double>();
        m.weights = p["weights"].get<std::vector<double>>();
        model.pair_models.push_back(std::move(m));
    }
    return model;
}

inline void save_svm_model(const LinearSvmModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("save_svm_model: cannot open " + path.string());
    out << svm_model_to_json(model).dump(2) << "\n";
}

inline LinearSvmModel load_svm_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("load_svm_model: cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("load_svm_model: " + std::string(e.what()));
    }
    return svm_model_from_json(doc);
}

} // namespace flowbench::eval
