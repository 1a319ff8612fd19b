#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "clbp/colorspace.hpp"
#include "clbp/error.hpp"
#include "clbp/image.hpp"

namespace clbp {

struct LbpParams {
    int neighbors = 8;  // P
    int radius = 1;     // R

    void validate() const {
        if (neighbors < 2 || neighbors > 24)
            throw ConfigError("lbp: P must be in [2, 24], got " + std::to_string(neighbors));
        if (radius < 1) throw ConfigError("lbp: R must be >= 1, got " + std::to_string(radius));
    }
};

/// LBP code plane. Codes exist only for interior pixels (margin = R); the
/// stored plane is (height-2R) x (width-2R).
struct LbpMap {
    int width = 0;   // source dimensions
    int height = 0;
    int margin = 0;  // R
    int neighbors = 0;
    std::vector<std::uint32_t> codes;  // row-major over the interior

    int interior_width() const { return width - 2 * margin; }
    int interior_height() const { return height - 2 * margin; }

    /// Code of the interior pixel at source coordinates (row, col).
    std::uint32_t at(int row, int col) const {
        return codes[static_cast<std::size_t>(row - margin) * interior_width() + (col - margin)];
    }
};

namespace detail {

// Neighbor m sits at angle 2*pi*m/P from east, counter-clockwise on screen:
// col offset R*cos, row offset -R*sin.
struct NeighborOffset {
    double drow;
    double dcol;
};

inline std::vector<NeighborOffset> neighbor_offsets(const LbpParams& params) {
    std::vector<NeighborOffset> offsets(params.neighbors);
    for (int m = 0; m < params.neighbors; ++m) {
        const double angle = 2.0 * std::numbers::pi * m / params.neighbors;
        offsets[m] = {-params.radius * std::sin(angle), params.radius * std::cos(angle)};
    }
    return offsets;
}

inline double bilinear(const ChannelImage& ch, double row, double col) {
    const int r0 = static_cast<int>(std::floor(row));
    const int c0 = static_cast<int>(std::floor(col));
    const double fr = row - r0;
    const double fc = col - c0;
    const int r1 = fr > 0.0 ? r0 + 1 : r0;
    const int c1 = fc > 0.0 ? c0 + 1 : c0;
    const double v00 = ch.at(r0, c0);
    const double v01 = ch.at(r0, c1);
    const double v10 = ch.at(r1, c0);
    const double v11 = ch.at(r1, c1);
    return v00 * (1 - fr) * (1 - fc) + v01 * (1 - fr) * fc + v10 * fr * (1 - fc) + v11 * fr * fc;
}

}  // namespace detail

/// Traditional LBP of one channel: code = sum over m of S(neighbor_m - center) * 2^m
/// with S(t) = 1 iff t >= 0 (ties count as 1). For P=8, R=1 neighbors are the
/// eight adjacent pixels in order [E, NE, N, NW, W, SW, S, SE]; other (P, R)
/// sample the circle with bilinear interpolation.
inline LbpMap lbp_channel(const ChannelImage& ch, const LbpParams& params = {}) {
    params.validate();
    const int R = params.radius;
    const int P = params.neighbors;
    if (ch.width < 2 * R + 2 || ch.height < 2 * R + 2)
        throw ConfigError("lbp: channel " + std::to_string(ch.width) + "x" +
                          std::to_string(ch.height) + " too small for R=" + std::to_string(R));

    LbpMap map;
    map.width = ch.width;
    map.height = ch.height;
    map.margin = R;
    map.neighbors = P;
    const int iw = map.interior_width();
    const int ih = map.interior_height();
    map.codes.resize(static_cast<std::size_t>(iw) * ih);

    if (P == 8 && R == 1) {
        const double* v = ch.values.data();
        const int w = ch.width;
        for (int r = 1; r <= ih; ++r) {
            const double* up = v + static_cast<std::size_t>(r - 1) * w;
            const double* mid = up + w;
            const double* down = mid + w;
            std::uint32_t* out = map.codes.data() + static_cast<std::size_t>(r - 1) * iw;
            for (int c = 1; c <= iw; ++c) {
                const double center = mid[c];
                std::uint32_t code = 0;
                code |= static_cast<std::uint32_t>(mid[c + 1] >= center);        // E
                code |= static_cast<std::uint32_t>(up[c + 1] >= center) << 1;    // NE
                code |= static_cast<std::uint32_t>(up[c] >= center) << 2;        // N
                code |= static_cast<std::uint32_t>(up[c - 1] >= center) << 3;    // NW
                code |= static_cast<std::uint32_t>(mid[c - 1] >= center) << 4;   // W
                code |= static_cast<std::uint32_t>(down[c - 1] >= center) << 5;  // SW
                code |= static_cast<std::uint32_t>(down[c] >= center) << 6;      // S
                code |= static_cast<std::uint32_t>(down[c + 1] >= center) << 7;  // SE
                out[c - 1] = code;
            }
        }
        return map;
    }

    const auto offsets = detail::neighbor_offsets(params);
    for (int r = R; r < ch.height - R; ++r) {
        for (int c = R; c < ch.width - R; ++c) {
            const double center = ch.at(r, c);
            std::uint32_t code = 0;
            for (int m = 0; m < P; ++m) {
                const double value = detail::bilinear(ch, r + offsets[m].drow, c + offsets[m].dcol);
                code |= static_cast<std::uint32_t>(value >= center) << m;
            }
            map.codes[static_cast<std::size_t>(r - R) * iw + (c - R)] = code;
        }
    }
    return map;
}

}  // namespace clbp
