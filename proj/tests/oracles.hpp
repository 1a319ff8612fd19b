#pragma once

// Independent reference implementations used as test oracles. These follow
// the defining sums literally, pixel by pixel and bit by bit, and share no
// code with the library kernels they check.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "clbp/decoder.hpp"
#include "clbp/image.hpp"
#include "clbp/lbp.hpp"

namespace oracle {

inline double rss_scalar(double center, double other1, double other2, double xi) {
    return (std::fabs(center - other1) + std::fabs(center - other2)) / (center + xi);
}

/// Literal LBP: walks the P neighbors one by one. Integer offsets for the
/// 8-neighborhood, bilinear sampling otherwise.
inline std::vector<std::uint32_t> naive_lbp(const clbp::ChannelImage& ch, int P, int R) {
    const int iw = ch.width - 2 * R;
    const int ih = ch.height - 2 * R;
    std::vector<std::uint32_t> out(static_cast<std::size_t>(iw) * ih, 0);
    for (int r = R; r < ch.height - R; ++r) {
        for (int c = R; c < ch.width - R; ++c) {
            std::uint32_t code = 0;
            for (int m = 0; m < P; ++m) {
                const double angle = 2.0 * std::numbers::pi * m / P;
                double value;
                if (P == 8 && R == 1) {
                    const int dc = static_cast<int>(std::lround(std::cos(angle)));
                    const int dr = -static_cast<int>(std::lround(std::sin(angle)));
                    value = ch.at(r + dr, c + dc);
                } else {
                    const double row = r - R * std::sin(angle);
                    const double col = c + R * std::cos(angle);
                    const int r0 = static_cast<int>(std::floor(row));
                    const int c0 = static_cast<int>(std::floor(col));
                    const double fr = row - r0;
                    const double fc = col - c0;
                    const int r1 = fr > 0.0 ? r0 + 1 : r0;
                    const int c1 = fc > 0.0 ? c0 + 1 : c0;
                    value = ch.at(r0, c0) * (1 - fr) * (1 - fc) + ch.at(r0, c1) * (1 - fr) * fc +
                            ch.at(r1, c0) * fr * (1 - fc) + ch.at(r1, c1) * fr * fc;
                }
                if (value >= ch.at(r, c)) code += static_cast<std::uint32_t>(1) << m;
            }
            out[static_cast<std::size_t>(r - R) * iw + (c - R)] = code;
        }
    }
    return out;
}

/// Literal decoding: per pixel and per bit position m (1-based), assembles
/// dM^m by weighting channel j's bit with 2^(n-j), then gives plane c bit m
/// whenever dM^m equals c-1.
inline std::vector<std::vector<std::uint32_t>> naive_decode(
    const std::vector<clbp::LbpMap>& maps, int P) {
    const int n = static_cast<int>(maps.size());
    const std::size_t pixels = maps[0].codes.size();
    std::vector<std::vector<std::uint32_t>> planes(std::size_t{1} << n,
                                                   std::vector<std::uint32_t>(pixels, 0));
    for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t c = 1; c <= planes.size(); ++c) {
            std::uint32_t code = 0;
            for (int m = 1; m <= P; ++m) {
                std::uint32_t dm = 0;
                for (int j = 1; j <= n; ++j) {
                    const std::uint32_t bit = (maps[j - 1].codes[i] >> (m - 1)) & 1u;
                    dm += bit * (std::uint32_t{1} << (n - j));
                }
                if (dm == c - 1) code += std::uint32_t{1} << (m - 1);
            }
            planes[c - 1][i] = code;
        }
    }
    return planes;
}

/// Frequency histogram of one plane, normalized by the pixel count.
inline std::vector<double> naive_histogram(const std::vector<std::uint32_t>& plane, int P) {
    std::vector<double> h(std::size_t{1} << P, 0.0);
    for (std::uint32_t code : plane) h[code] += 1.0;
    for (double& v : h) v /= static_cast<double>(plane.size());
    return h;
}

/// Nearest class centroid, L2. Tie goes to the lower class index.
struct NearestCentroid {
    std::vector<std::vector<double>> centroids;

    void fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
             int num_classes) {
        centroids.assign(num_classes, std::vector<double>(x[0].size(), 0.0));
        std::vector<std::size_t> counts(num_classes, 0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t j = 0; j < x[i].size(); ++j) centroids[y[i]][j] += x[i][j];
            ++counts[y[i]];
        }
        for (int c = 0; c < num_classes; ++c)
            for (double& v : centroids[c]) v /= static_cast<double>(counts[c]);
    }

    int predict(const std::vector<double>& v) const {
        int best = 0;
        double best_d2 = -1.0;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                const double d = v[j] - centroids[c][j];
                d2 += d * d;
            }
            if (best_d2 < 0.0 || d2 < best_d2) {
                best_d2 = d2;
                best = static_cast<int>(c);
            }
        }
        return best;
    }
};

/// 1-nearest-neighbor over stored vectors, L2. Tie goes to the earlier sample.
struct NearestNeighbor {
    std::vector<std::vector<double>> x;
    std::vector<int> y;

    int predict(const std::vector<double>& v) const {
        int best = y[0];
        double best_d2 = -1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                const double d = v[j] - x[i][j];
                d2 += d * d;
            }
            if (best_d2 < 0.0 || d2 < best_d2) {
                best_d2 = d2;
                best = y[i];
            }
        }
        return best;
    }
};

}  // namespace oracle
