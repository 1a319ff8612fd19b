#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clbp/error.hpp"
#include "clbp/feature_io.hpp"
#include "clbp/noise.hpp"

namespace clbp {

struct LabeledFeature {
    std::vector<double> vec;
    int label = 0;        // class index
    std::string source;   // originating path, for diagnostics
};

/// One-vs-rest linear separators: score_c(x) = w_c . x + b_c.
struct LinearModel {
    std::vector<std::string> classes;
    std::size_t dim = 0;
    std::vector<std::vector<double>> weights;  // per class, length dim
    std::vector<double> biases;
    double lambda = 1e-4;
    int epochs = 50;
    std::uint64_t seed = 42;
};

namespace detail {

/// Lemire-style bounded draw; pinned here because the stdlib distributions
/// are implementation-defined.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng()) * bound) >> 64);
}

inline void fisher_yates(std::vector<std::uint32_t>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[bounded_rand(rng, i)]);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

/// Trains one L2-regularized hinge-loss separator per class by epoch-wise
/// subgradient descent with step 1/(lambda*t) and seeded per-epoch shuffling.
/// No intercept is fitted (the reference linear SVM's default): histogram
/// entries sit near 1/(2^n * 2^P), so a constant-1 bias feature would be
/// orders of magnitude larger than every real feature and its subgradient
/// would drown the signal. The model's bias slot stays 0.
/// Deterministic given (data order, lambda, epochs, seed).
inline LinearModel train(const std::vector<LabeledFeature>& data,
                         const std::vector<std::string>& classes, double lambda = 1e-4,
                         int epochs = 50, std::uint64_t seed = 42) {
    if (classes.size() < 2) throw ConfigError("train: need at least 2 classes");
    if (data.empty()) throw DataError("train: no training samples");
    const std::size_t dim = data[0].vec.size();
    std::vector<std::size_t> per_class(classes.size(), 0);
    for (const auto& s : data) {
        if (s.vec.size() != dim) throw DataError("train: inconsistent feature dimensions");
        if (s.label < 0 || static_cast<std::size_t>(s.label) >= classes.size())
            throw DataError("train: label out of range");
        ++per_class[static_cast<std::size_t>(s.label)];
    }
    for (std::size_t c = 0; c < classes.size(); ++c)
        if (per_class[c] == 0)
            throw DataError("train: class '" + classes[c] + "' has no training samples");
    if (!(lambda > 0.0)) throw ConfigError("train: lambda must be positive");
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");

    LinearModel model;
    model.classes = classes;
    model.dim = dim;
    model.lambda = lambda;
    model.epochs = epochs;
    model.seed = seed;
    model.weights.assign(classes.size(), std::vector<double>(dim, 0.0));
    model.biases.assign(classes.size(), 0.0);

    std::vector<std::uint32_t> order(data.size());
    std::vector<double> v(dim);  // w is kept factored as scale * v
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::mt19937_64 rng(detail::mix_seed(seed ^ 0x53564D0000ULL, c));
        std::fill(v.begin(), v.end(), 0.0);
        double scale = 1.0;  // ends up as 1/t after the t=1 shrink zeroes w
        std::uint64_t t = 1;
        for (int epoch = 0; epoch < epochs; ++epoch) {
            std::iota(order.begin(), order.end(), 0u);
            detail::fisher_yates(order, rng);
            for (std::uint32_t i : order) {
                const LabeledFeature& s = data[i];
                const double y = s.label == static_cast<int>(c) ? 1.0 : -1.0;
                const double margin = y * scale * detail::dot(v, s.vec);
                if (t == 1) {
                    // shrink factor (1 - 1/t) is zero: restart the iterate
                    std::fill(v.begin(), v.end(), 0.0);
                    scale = 1.0;
                } else {
                    scale *= 1.0 - 1.0 / static_cast<double>(t);
                }
                if (margin < 1.0) {
                    const double step = y / (lambda * static_cast<double>(t) * scale);
                    for (std::size_t j = 0; j < dim; ++j) v[j] += step * s.vec[j];
                }
                ++t;
            }
        }
        std::vector<double>& w = model.weights[c];
        for (std::size_t j = 0; j < dim; ++j) w[j] = scale * v[j];
    }
    return model;
}

/// Argmax of per-class scores; ties go to the lower class index.
inline int predict(const LinearModel& model, const std::vector<double>& vec) {
    if (vec.size() != model.dim)
        throw DataError("predict: feature dim " + std::to_string(vec.size()) +
                        " does not match model dim " + std::to_string(model.dim));
    int best = 0;
    double best_score = detail::dot(model.weights[0], vec) + model.biases[0];
    for (std::size_t c = 1; c < model.weights.size(); ++c) {
        const double score = detail::dot(model.weights[c], vec) + model.biases[c];
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(c);
        }
    }
    return best;
}

/// Stratified fold assignment: per class, samples keep manifest order, are
/// shuffled by a seeded generator and dealt round-robin, so per-class fold
/// sizes differ by at most one.
struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<int> assignments;  // fold index per sample
};

inline FoldPlan make_folds(const std::vector<int>& labels, int num_classes, int k,
                           std::uint64_t seed) {
    if (k < 2) throw ConfigError("make_folds: k must be >= 2");
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(labels.size(), -1);
    for (int c = 0; c < num_classes; ++c) {
        std::vector<std::uint32_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) members.push_back(static_cast<std::uint32_t>(i));
        if (members.size() < static_cast<std::size_t>(k))
            throw ConfigError("make_folds: class " + std::to_string(c) + " has " +
                              std::to_string(members.size()) + " samples for k=" +
                              std::to_string(k));
        std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(c)));
        detail::fisher_yates(members, rng);
        for (std::size_t i = 0; i < members.size(); ++i)
            plan.assignments[members[i]] = static_cast<int>(i % k);
    }
    return plan;
}

// --- CLBP-MODEL v1 ---------------------------------------------------------

inline void write_model(std::ostream& out, const LinearModel& model) {
    out << "CLBP-MODEL v1\n";
    out << "classes=";
    for (std::size_t i = 0; i < model.classes.size(); ++i)
        out << (i ? "," : "") << model.classes[i];
    out << " dim=" << model.dim << " lambda=" << detail::format_double(model.lambda)
        << " epochs=" << model.epochs << " seed=" << model.seed << "\n";
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        for (std::size_t j = 0; j < model.dim; ++j)
            out << detail::format_double(model.weights[c][j]) << " ";
        out << detail::format_double(model.biases[c]) << "\n";
    }
}

inline void write_model(const std::filesystem::path& path, const LinearModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    write_model(out, model);
}

inline LinearModel read_model(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line) || line != "CLBP-MODEL v1")
        throw DataError("model file: bad signature: " + name);
    if (!std::getline(in, line)) throw DataError("model file: missing header: " + name);

    LinearModel model;
    std::istringstream header(line);
    std::string tok;
    while (header >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw DataError("model file: bad header token '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        if (key == "classes") {
            std::size_t pos = 0;
            while (pos <= value.size()) {
                const auto comma = value.find(',', pos);
                const auto end = comma == std::string::npos ? value.size() : comma;
                model.classes.push_back(value.substr(pos, end - pos));
                pos = end + 1;
                if (comma == std::string::npos) break;
            }
        } else if (key == "dim") model.dim = static_cast<std::size_t>(detail::parse_long(value, "dim"));
        else if (key == "lambda") model.lambda = detail::parse_double(value, "lambda");
        else if (key == "epochs") model.epochs = static_cast<int>(detail::parse_long(value, "epochs"));
        else if (key == "seed") model.seed = std::strtoull(value.c_str(), nullptr, 10);
        else throw DataError("model file: unknown header key '" + key + "'");
    }
    if (model.classes.size() < 2) throw DataError("model file: needs at least 2 classes: " + name);

    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        if (!std::getline(in, line)) throw DataError("model file: missing weight row: " + name);
        std::istringstream row(line);
        std::vector<double> w(model.dim);
        for (std::size_t j = 0; j < model.dim; ++j)
            if (!(row >> w[j])) throw DataError("model file: short weight row: " + name);
        double bias;
        if (!(row >> bias)) throw DataError("model file: missing bias: " + name);
        model.weights.push_back(std::move(w));
        model.biases.push_back(bias);
    }
    return model;
}

inline LinearModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    return read_model(in, path.string());
}

}  // namespace clbp
