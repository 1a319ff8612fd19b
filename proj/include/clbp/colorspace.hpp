#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "clbp/error.hpp"
#include "clbp/image.hpp"

namespace clbp {

/// Guard for the relative-similarity denominator.
struct RssParams {
    double xi = 1.0;
};

enum class StackKind { Rgb, Rss, RgbRss };

inline std::string to_string(StackKind kind) {
    switch (kind) {
        case StackKind::Rgb: return "rgb";
        case StackKind::Rss: return "rss";
        case StackKind::RgbRss: return "rgb+rss";
    }
    throw ConfigError("invalid stack kind");
}

inline StackKind stack_kind_from_string(const std::string& s) {
    if (s == "rgb") return StackKind::Rgb;
    if (s == "rss") return StackKind::Rss;
    if (s == "rgb+rss") return StackKind::RgbRss;
    throw ConfigError("unknown space '" + s + "' (expected rgb, rss or rgb+rss)");
}

inline int stack_channel_count(StackKind kind) { return kind == StackKind::RgbRss ? 6 : 3; }

/// Ordered channel planes of one image; [R,G,B], [RSR,RSG,RSB] or the
/// concatenation of both.
struct ChannelStack {
    StackKind kind = StackKind::Rgb;
    std::vector<ChannelImage> channels;

    int n() const { return static_cast<int>(channels.size()); }
};

/// Similarity of p relative to q: |p - q| / (p + xi). Asymmetric; equal inputs
/// give 0; the p > q branch stays below 1.
inline double relative_similarity(double p, double q, double xi) {
    return std::abs(p - q) / (p + xi);
}

/// Plain absolute difference. Kept as a documented reference point for
/// relative_similarity; not used on the feature path.
inline double abs_similarity(double p, double q) { return std::abs(p - q); }

/// Relative Similarity Space transform: per pixel,
///   RSR = (|R-G| + |R-B|) / (R + xi)
///   RSG = (|G-R| + |G-B|) / (G + xi)
///   RSB = (|B-R| + |B-G|) / (B + xi)
/// Values stay floating point; nothing is quantized.
inline ChannelStack to_rss(const RgbImage& img, const RssParams& params = {}) {
    if (!(params.xi > 0.0)) throw ConfigError("to_rss: xi must be positive");
    ChannelStack stack;
    stack.kind = StackKind::Rss;
    stack.channels.assign(3, ChannelImage(img.width, img.height));
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double r = img.data[3 * i];
        const double g = img.data[3 * i + 1];
        const double b = img.data[3 * i + 2];
        stack.channels[0].values[i] = (std::abs(r - g) + std::abs(r - b)) / (r + params.xi);
        stack.channels[1].values[i] = (std::abs(g - r) + std::abs(g - b)) / (g + params.xi);
        stack.channels[2].values[i] = (std::abs(b - r) + std::abs(b - g)) / (b + params.xi);
    }
    return stack;
}

/// Assembles the configured channel stack: RGB planes widened to double, the
/// RSS planes, or [R,G,B,RSR,RSG,RSB].
inline ChannelStack build_stack(const RgbImage& img, StackKind kind, const RssParams& params = {}) {
    ChannelStack stack;
    stack.kind = kind;
    if (kind == StackKind::Rgb || kind == StackKind::RgbRss) {
        for (int ch = 0; ch < 3; ++ch) {
            ChannelImage plane(img.width, img.height);
            for (std::size_t i = 0; i < img.pixel_count(); ++i)
                plane.values[i] = static_cast<double>(img.data[3 * i + ch]);
            stack.channels.push_back(std::move(plane));
        }
    }
    if (kind == StackKind::Rss || kind == StackKind::RgbRss) {
        ChannelStack rss = to_rss(img, params);
        for (auto& plane : rss.channels) stack.channels.push_back(std::move(plane));
    }
    return stack;
}

}  // namespace clbp
