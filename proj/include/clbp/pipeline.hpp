#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "clbp/classify.hpp"
#include "clbp/dataset.hpp"
#include "clbp/decoder.hpp"
#include "clbp/error.hpp"
#include "clbp/learning.hpp"
#include "clbp/noise.hpp"

namespace clbp {

/// Everything one experiment run needs; serialized into output files for
/// provenance.
struct RunConfig {
    StackKind space = StackKind::RgbRss;
    double xi = 1.0;
    int neighbors = 8;     // P
    int radius = 1;        // R
    std::size_t d = 900;   // dominant pattern count
    int grid_rows = 1;
    int grid_cols = 1;
    int folds = 10;
    std::uint64_t seed = 42;
    double lambda = 1e-4;
    int epochs = 50;
    std::optional<double> noise_snr;  // test-time corruption, dB
    std::uint64_t noise_seed = 0;
    bool noise_on_train = false;

    RssParams rss() const { return {xi}; }
    LbpParams lbp() const { return {neighbors, radius}; }
    int tiles() const { return grid_rows * grid_cols; }

    void validate() const {
        lbp().validate();
        if (!(xi > 0.0)) throw ConfigError("config: xi must be positive");
        if (grid_rows < 1 || grid_cols < 1) throw ConfigError("config: grid must be at least 1x1");
        if (folds < 2) throw ConfigError("config: k must be >= 2");
        if (d < 1) throw ConfigError("config: D must be >= 1");
        if (epochs < 1) throw ConfigError("config: epochs must be >= 1");
        if (!(lambda > 0.0)) throw ConfigError("config: lambda must be positive");
    }

    std::string str() const {
        std::ostringstream out;
        out << "space=" << to_string(space) << " xi=" << detail::format_double(xi)
            << " P=" << neighbors << " R=" << radius << " D=" << d << " grid=" << grid_rows << "x"
            << grid_cols << " k=" << folds << " seed=" << seed
            << " lambda=" << detail::format_double(lambda) << " epochs=" << epochs;
        if (noise_snr) out << " noise_snr=" << detail::format_double(*noise_snr)
                           << " noise_seed=" << noise_seed
                           << " noise_on_train=" << (noise_on_train ? 1 : 0);
        return out.str();
    }
};

/// Extracts one image under the run config; a non-trivial grid concatenates
/// the per-tile vectors in row-major tile order (dim scales by the tile count).
inline FeatureVector extract_image(const RgbImage& img, const RunConfig& cfg) {
    if (cfg.grid_rows == 1 && cfg.grid_cols == 1)
        return extract(img, cfg.space, cfg.rss(), cfg.lbp());
    FeatureVector out;
    for (const RgbImage& tile : split_grid(img, cfg.grid_rows, cfg.grid_cols)) {
        FeatureVector part = extract(tile, cfg.space, cfg.rss(), cfg.lbp());
        out.desc = part.desc;
        out.values.insert(out.values.end(), part.values.begin(), part.values.end());
    }
    return out;
}

/// Optional per-sample corruption applied before extraction (noise,
/// illumination scaling, ...). Index is the sample's manifest position.
using ImageTransform = std::function<RgbImage(const RgbImage&, std::size_t)>;

namespace detail {

/// Runs body(0..count-1) across hardware threads. The first exception thrown
/// by any iteration is captured and rethrown after all workers join.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(
        std::max(1u, std::thread::hardware_concurrency()), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Extracts every manifest entry, in manifest order. Images are processed in
/// parallel; each result lands in its own slot, so the output is independent
/// of scheduling.
inline std::vector<FeatureRecord> extract_dataset(const DatasetManifest& manifest,
                                                  const RunConfig& cfg,
                                                  const ImageTransform& transform = {}) {
    cfg.validate();
    if (manifest.entries.empty()) throw DataError("extract_dataset: empty manifest");
    std::vector<FeatureRecord> records(manifest.size());
    detail::parallel_for(manifest.size(), [&](std::size_t i) {
        RgbImage img = load_image(manifest.entries[i].path);
        if (transform) img = transform(img, i);
        records[i].vec = extract_image(img, cfg);
        records[i].label = manifest.entries[i].label;
    });
    return records;
}

// --- cross-validation ------------------------------------------------------

struct CrossValResult {
    int k = 0;
    std::vector<double> fold_accuracy;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<std::uint64_t> fold_table_checksum;  // fingerprint of each fold's table
    FoldPlan plan;
};

namespace detail {

inline CrossValResult run_cv_on_features(const std::vector<FeatureVector>& clean,
                                         const std::vector<FeatureVector>& test_time,
                                         const std::vector<int>& labels,
                                         const std::vector<std::string>& classes,
                                         const RunConfig& cfg, int k) {
    const FoldPlan plan = make_folds(labels, static_cast<int>(classes.size()), k, cfg.seed);
    CrossValResult result;
    result.k = k;
    result.plan = plan;

    const std::size_t dim = clean.front().dim();
    if (cfg.d > dim)
        throw ConfigError("config: D=" + std::to_string(cfg.d) + " exceeds feature dim " +
                          std::to_string(dim));

    // Folds are independent; run them in parallel, each writing its own slot.
    result.fold_accuracy.assign(k, 0.0);
    result.fold_table_checksum.assign(k, 0);
    parallel_for(static_cast<std::size_t>(k), [&](std::size_t fold) {
        std::vector<FeatureVector> train_feats;
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < clean.size(); ++i) {
            if (plan.assignments[i] == static_cast<int>(fold)) test_idx.push_back(i);
            else { train_idx.push_back(i); train_feats.push_back(clean[i]); }
        }
        // Pattern table from the training folds only.
        const CumulativeHistogram cum = accumulate(train_feats);
        const PatternTable table = learn_table(cum, cfg.d, cfg.tiles());
        result.fold_table_checksum[fold] = table_checksum(table);

        std::vector<LabeledFeature> train_set;
        train_set.reserve(train_idx.size());
        for (std::size_t i : train_idx)
            train_set.push_back({select(cfg.noise_on_train ? test_time[i] : clean[i], table),
                                 labels[i], ""});
        const LinearModel model = train(train_set, classes, cfg.lambda, cfg.epochs, cfg.seed);

        std::size_t correct = 0;
        for (std::size_t i : test_idx)
            if (predict(model, select(test_time[i], table)) == labels[i]) ++correct;
        result.fold_accuracy[fold] =
            static_cast<double>(correct) / static_cast<double>(test_idx.size());
    });

    double sum = 0.0;
    for (double a : result.fold_accuracy) sum += a;
    result.mean = sum / static_cast<double>(k);
    double var = 0.0;
    for (double a : result.fold_accuracy) var += (a - result.mean) * (a - result.mean);
    result.stddev = std::sqrt(var / static_cast<double>(k));
    return result;
}

}  // namespace detail

/// Full protocol: stratified k-fold CV where each fold learns its pattern
/// table on the training folds, selects, trains the linear model and scores
/// the held-out fold. test_transform, when given, corrupts test images before
/// extraction (training images stay clean unless cfg.noise_on_train).
/// k drops to the smallest class size (with a warning) when a class is short.
inline CrossValResult cross_validate(const DatasetManifest& manifest, const RunConfig& cfg,
                                     const ImageTransform& test_transform = {}) {
    cfg.validate();
    if (manifest.entries.empty()) throw DataError("cross_validate: empty manifest");

    std::vector<int> labels(manifest.size());
    std::vector<std::size_t> class_count(manifest.classes.size(), 0);
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        labels[i] = manifest.class_index(manifest.entries[i].label);
        ++class_count[labels[i]];
    }
    std::size_t min_class = class_count[0];
    for (std::size_t c : class_count) min_class = std::min(min_class, c);
    int k = cfg.folds;
    if (static_cast<std::size_t>(k) > min_class) {
        k = static_cast<int>(min_class);
        std::cerr << "warning: lowering k to " << k << " (smallest class has " << min_class
                  << " samples)\n";
        if (k < 2) throw DataError("cross_validate: smallest class has fewer than 2 samples");
    }

    ImageTransform transform = test_transform;
    if (!transform && cfg.noise_snr) {
        const double snr = *cfg.noise_snr;
        const std::uint64_t base_seed = cfg.noise_seed;
        transform = [snr, base_seed](const RgbImage& img, std::size_t idx) {
            return add_gaussian_noise(img, {snr, detail::mix_seed(base_seed, idx)});
        };
    }

    std::vector<FeatureVector> clean, test_time;
    {
        auto records = extract_dataset(manifest, cfg);
        clean.reserve(records.size());
        for (auto& rec : records) clean.push_back(std::move(rec.vec));
    }
    if (transform) {
        auto records = extract_dataset(manifest, cfg, transform);
        test_time.reserve(records.size());
        for (auto& rec : records) test_time.push_back(std::move(rec.vec));
    } else {
        test_time = clean;
    }

    return detail::run_cv_on_features(clean, test_time, labels, manifest.classes, cfg, k);
}

/// Renders the per-fold CSV: config comment lines, `fold,accuracy` rows and
/// mean/stddev summary rows. Fixed formatting keeps identical runs
/// byte-identical.
inline std::string crossval_csv(const CrossValResult& result, const RunConfig& cfg) {
    std::ostringstream out;
    out << "# clbp crossval\n# " << cfg.str() << "\n";
    out << "fold,accuracy\n";
    char buf[32];
    for (std::size_t f = 0; f < result.fold_accuracy.size(); ++f) {
        std::snprintf(buf, sizeof(buf), "%.6f", result.fold_accuracy[f]);
        out << f << "," << buf << "\n";
    }
    std::snprintf(buf, sizeof(buf), "%.6f", result.mean);
    out << "mean," << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", result.stddev);
    out << "stddev," << buf << "\n";
    return out.str();
}

}  // namespace clbp
