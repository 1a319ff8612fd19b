#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "clbp/pipeline.hpp"

namespace clbp {

/// One benchmark measurement: a space, the swept parameter value (D, SNR in
/// dB or the illumination scale) and the CV accuracy it reached.
struct BenchRow {
    StackKind space;
    double param;
    double mean;
    double stddev;
};

namespace detail {

struct PreparedLabels {
    std::vector<int> labels;
    int k = 0;
};

inline PreparedLabels prepare_labels(const DatasetManifest& manifest, int requested_k) {
    PreparedLabels out;
    out.labels.resize(manifest.size());
    std::vector<std::size_t> class_count(manifest.classes.size(), 0);
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        out.labels[i] = manifest.class_index(manifest.entries[i].label);
        ++class_count[out.labels[i]];
    }
    std::size_t min_class = class_count[0];
    for (std::size_t c : class_count) min_class = std::min(min_class, c);
    out.k = requested_k;
    if (static_cast<std::size_t>(out.k) > min_class) {
        out.k = static_cast<int>(min_class);
        std::cerr << "warning: lowering k to " << out.k << " (smallest class has " << min_class
                  << " samples)\n";
        if (out.k < 2) throw DataError("cross-validation needs at least 2 samples per class");
    }
    return out;
}

inline std::vector<FeatureVector> feature_vectors(const DatasetManifest& manifest,
                                                  const RunConfig& cfg,
                                                  const ImageTransform& transform = {}) {
    std::vector<FeatureVector> out;
    auto records = extract_dataset(manifest, cfg, transform);
    out.reserve(records.size());
    for (auto& rec : records) out.push_back(std::move(rec.vec));
    return out;
}

}  // namespace detail

/// Fig.-6-style protocol: CV accuracy as a function of the dominant-pattern
/// count D, per space. Features are extracted once per space and reused for
/// every D; a D above the feature dimension is clamped to it.
inline std::vector<BenchRow> d_sweep(const DatasetManifest& manifest, const RunConfig& base,
                                     const std::vector<std::size_t>& d_values,
                                     const std::vector<StackKind>& spaces) {
    base.validate();
    if (d_values.empty()) throw ConfigError("d_sweep: no D values");
    if (spaces.empty()) throw ConfigError("d_sweep: no spaces");
    const auto prepared = detail::prepare_labels(manifest, base.folds);

    std::vector<BenchRow> rows;
    for (StackKind space : spaces) {
        RunConfig cfg = base;
        cfg.space = space;
        const auto clean = detail::feature_vectors(manifest, cfg);
        for (std::size_t d : d_values) {
            cfg.d = std::min(d, clean.front().dim());
            const auto result = detail::run_cv_on_features(clean, clean, prepared.labels,
                                                           manifest.classes, cfg, prepared.k);
            rows.push_back({space, static_cast<double>(d), result.mean, result.stddev});
        }
    }
    return rows;
}

/// Noise-robustness protocol: test images (only) are corrupted at each SNR
/// before extraction; the table and model always come from clean training
/// folds.
inline std::vector<BenchRow> noise_bench(const DatasetManifest& manifest, const RunConfig& base,
                                         const std::vector<double>& snrs,
                                         const std::vector<StackKind>& spaces) {
    base.validate();
    if (snrs.empty()) throw ConfigError("noise_bench: no SNR values");
    if (spaces.empty()) throw ConfigError("noise_bench: no spaces");
    const auto prepared = detail::prepare_labels(manifest, base.folds);

    std::vector<BenchRow> rows;
    for (StackKind space : spaces) {
        RunConfig cfg = base;
        cfg.space = space;
        const auto clean = detail::feature_vectors(manifest, cfg);
        cfg.d = std::min(cfg.d, clean.front().dim());
        for (double snr : snrs) {
            const std::uint64_t base_seed = base.noise_seed;
            const auto noisy = detail::feature_vectors(
                manifest, cfg, [snr, base_seed](const RgbImage& img, std::size_t idx) {
                    return add_gaussian_noise(img, {snr, detail::mix_seed(base_seed, idx)});
                });
            const auto result = detail::run_cv_on_features(clean, noisy, prepared.labels,
                                                           manifest.classes, cfg, prepared.k);
            rows.push_back({space, snr, result.mean, result.stddev});
        }
    }
    return rows;
}

/// Illumination protocol: test images are uniformly scaled by each alpha
/// (clamped to [0,255]) before extraction; training images stay untouched.
inline std::vector<BenchRow> illum_bench(const DatasetManifest& manifest, const RunConfig& base,
                                         const std::vector<double>& alphas,
                                         const std::vector<StackKind>& spaces) {
    base.validate();
    if (alphas.empty()) throw ConfigError("illum_bench: no alpha values");
    for (double a : alphas)
        if (!(a > 0.0)) throw ConfigError("illum_bench: alphas must be positive");
    if (spaces.empty()) throw ConfigError("illum_bench: no spaces");
    const auto prepared = detail::prepare_labels(manifest, base.folds);

    std::vector<BenchRow> rows;
    for (StackKind space : spaces) {
        RunConfig cfg = base;
        cfg.space = space;
        const auto clean = detail::feature_vectors(manifest, cfg);
        cfg.d = std::min(cfg.d, clean.front().dim());
        for (double alpha : alphas) {
            const auto scaled =
                alpha == 1.0 ? clean
                             : detail::feature_vectors(manifest, cfg,
                                                       [alpha](const RgbImage& img, std::size_t) {
                                                           return scale_intensity(img, alpha);
                                                       });
            const auto result = detail::run_cv_on_features(clean, scaled, prepared.labels,
                                                           manifest.classes, cfg, prepared.k);
            rows.push_back({space, alpha, result.mean, result.stddev});
        }
    }
    return rows;
}

/// CSV rendering shared by the bench subcommands. param_name labels the
/// second column (D, snr_db, alpha).
inline std::string bench_csv(const std::vector<BenchRow>& rows, const std::string& param_name,
                             const std::string& command, const RunConfig& cfg) {
    std::ostringstream out;
    out << "# clbp " << command << "\n# " << cfg.str() << "\n";
    out << "space," << param_name << ",mean_accuracy,stddev\n";
    char buf[96];
    for (const BenchRow& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.6f,%.6f", to_string(row.space).c_str(),
                      row.param, row.mean, row.stddev);
        out << buf << "\n";
    }
    return out.str();
}

}  // namespace clbp
