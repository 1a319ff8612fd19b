#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clbp/colorspace.hpp"
#include "clbp/error.hpp"
#include "clbp/lbp.hpp"

namespace clbp {

/// Extraction provenance carried by feature vectors, pattern tables and
/// feature files. Two artifacts interoperate only if their descriptors match.
struct Descriptor {
    StackKind kind = StackKind::RgbRss;
    int n = 6;       // channel count
    int neighbors = 8;
    int radius = 1;
    double xi = 1.0;

    bool operator==(const Descriptor& o) const {
        return kind == o.kind && n == o.n && neighbors == o.neighbors && radius == o.radius &&
               xi == o.xi;
    }
    bool operator!=(const Descriptor& o) const { return !(*this == o); }

    std::string str() const {
        return "kind=" + to_string(kind) + " n=" + std::to_string(n) +
               " P=" + std::to_string(neighbors) + " R=" + std::to_string(radius);
    }
};

/// The 2^n decoded LBP planes. At every interior pixel the P cross-channel
/// bit patterns select one plane each, so across planes the set bits
/// partition [1, P] and the codes sum to 2^P - 1.
struct DecodedMaps {
    int n = 0;
    int width = 0;
    int height = 0;
    int margin = 0;
    int neighbors = 0;
    std::vector<std::vector<std::uint32_t>> maps;  // 2^n interior planes

    int interior_width() const { return width - 2 * margin; }
    int interior_height() const { return height - 2 * margin; }
    std::size_t interior_count() const {
        return static_cast<std::size_t>(interior_width()) * interior_height();
    }
};

/// Normalized decoded-LBP histogram concatenation. values[(c-1)*2^P + k] is
/// the scaled frequency of code k in plane c; the whole vector sums to 1.
struct FeatureVector {
    Descriptor desc;
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
};

/// Joins n per-channel LBP maps into 2^n decoded planes. For bit position
/// m (1-based) the cross-channel pattern dM^m packs channel bits with channel
/// 1 as the most significant; plane c = dM^m + 1 receives bit m.
inline DecodedMaps decode(std::span<const LbpMap> maps, const LbpParams& params = {}) {
    params.validate();
    const int n = static_cast<int>(maps.size());
    if (n < 1 || n > 8) throw ConfigError("decode: channel count must be in [1, 8], got " +
                                          std::to_string(n));
    for (const LbpMap& m : maps) {
        if (m.width != maps[0].width || m.height != maps[0].height || m.margin != maps[0].margin ||
            m.neighbors != maps[0].neighbors)
            throw ConfigError("decode: LBP maps disagree in dimensions or parameters");
    }
    if (maps[0].neighbors != params.neighbors || maps[0].margin != params.radius)
        throw ConfigError("decode: LBP maps do not match the given parameters");

    DecodedMaps dec;
    dec.n = n;
    dec.width = maps[0].width;
    dec.height = maps[0].height;
    dec.margin = maps[0].margin;
    dec.neighbors = maps[0].neighbors;
    const std::size_t pixels = dec.interior_count();
    dec.maps.assign(std::size_t{1} << n, std::vector<std::uint32_t>(pixels, 0));

    const int P = params.neighbors;
    for (std::size_t i = 0; i < pixels; ++i) {
        std::uint32_t codes[8];
        for (int j = 0; j < n; ++j) codes[j] = maps[j].codes[i];
        for (int m = 0; m < P; ++m) {
            std::uint32_t dm = 0;
            for (int j = 0; j < n; ++j) dm |= ((codes[j] >> m) & 1u) << (n - 1 - j);
            dec.maps[dm][i] |= 1u << m;
        }
    }
    return dec;
}

inline DecodedMaps decode(const std::vector<LbpMap>& maps, const LbpParams& params = {}) {
    return decode(std::span<const LbpMap>(maps.data(), maps.size()), params);
}

/// Histograms every decoded plane over its interior pixels and concatenates:
/// value at (c-1)*2^P + k is count(plane c == k) / (interior pixels * 2^n).
/// kind and xi only stamp the descriptor.
inline FeatureVector histograms(const DecodedMaps& dec, StackKind kind, double xi) {
    const std::size_t bins = std::size_t{1} << dec.neighbors;
    const std::size_t pixels = dec.interior_count();
    if (pixels == 0) throw ConfigError("histograms: decoded maps have no interior");

    FeatureVector feat;
    feat.desc = {kind, dec.n, dec.neighbors, dec.margin, xi};
    feat.values.assign(dec.maps.size() * bins, 0.0);

    std::vector<std::uint32_t> counts(bins);
    // One division per bin: count/denom rounds once, so equal ratios from
    // different image sizes come out bit-identical.
    const double denom = static_cast<double>(pixels) * static_cast<double>(dec.maps.size());
    for (std::size_t c = 0; c < dec.maps.size(); ++c) {
        std::fill(counts.begin(), counts.end(), 0u);
        for (std::uint32_t code : dec.maps[c]) ++counts[code];
        double* out = feat.values.data() + c * bins;
        for (std::size_t k = 0; k < bins; ++k) out[k] = static_cast<double>(counts[k]) / denom;
    }
    return feat;
}

/// Full single-image pipeline: channel stack -> per-channel LBP -> decode ->
/// concatenated histograms. Deterministic.
inline FeatureVector extract(const RgbImage& img, StackKind kind, const RssParams& rss = {},
                             const LbpParams& lbp = {}) {
    const ChannelStack stack = build_stack(img, kind, rss);
    std::vector<LbpMap> maps;
    maps.reserve(stack.channels.size());
    for (const ChannelImage& ch : stack.channels) maps.push_back(lbp_channel(ch, lbp));
    return histograms(decode(maps, lbp), kind, rss.xi);
}

}  // namespace clbp
