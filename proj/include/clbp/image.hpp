#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "clbp/error.hpp"

namespace clbp {

/// Interleaved 8-bit RGB image, row-major. Pixel (row, col) starts at
/// data[3 * (row * width + col)].
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // r,g,b per pixel

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t& at(int row, int col, int ch) {
        return data[3 * (static_cast<std::size_t>(row) * width + col) + ch];
    }
    std::uint8_t at(int row, int col, int ch) const {
        return data[3 * (static_cast<std::size_t>(row) * width + col) + ch];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool empty() const { return width <= 0 || height <= 0; }

    bool operator==(const RgbImage& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

/// One real-valued plane (an R/G/B channel widened to double, or an RSS channel).
struct ChannelImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major

    ChannelImage() = default;
    ChannelImage(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

// ---------------------------------------------------------------------------
// PPM (P6) codec. Bit-exact: sample bytes pass through unchanged.
// ---------------------------------------------------------------------------

namespace detail {

// Reads one whitespace-delimited token, skipping '#' comments, as the PPM
// header grammar requires.
inline bool ppm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF) return false;
    while (c != EOF && !std::isspace(c) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.unget();
    return true;
}

inline int ppm_parse_int(const std::string& tok, const std::string& what) {
    int value = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9') throw DataError("ppm: malformed " + what + " '" + tok + "'");
        value = value * 10 + (ch - '0');
        if (value > 1 << 30) throw DataError("ppm: " + what + " out of range");
    }
    return value;
}

}  // namespace detail

inline RgbImage read_ppm(std::istream& in, const std::string& name = "<stream>") {
    std::string tok;
    if (!detail::ppm_next_token(in, tok)) throw DataError("ppm: empty file: " + name);
    if (tok != "P6") throw DataError("ppm: not a P6 file: " + name);
    std::string wtok, htok, mtok;
    if (!detail::ppm_next_token(in, wtok) || !detail::ppm_next_token(in, htok) ||
        !detail::ppm_next_token(in, mtok))
        throw DataError("ppm: truncated header: " + name);
    const int w = detail::ppm_parse_int(wtok, "width");
    const int h = detail::ppm_parse_int(htok, "height");
    const int maxval = detail::ppm_parse_int(mtok, "maxval");
    if (w <= 0 || h <= 0) throw DataError("ppm: bad dimensions: " + name);
    if (maxval <= 0 || maxval > 255)
        throw DataError("ppm: unsupported maxval " + std::to_string(maxval) + ": " + name);
    // Exactly one whitespace byte separates the header from the raster.
    RgbImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.data.size())
        throw DataError("ppm: truncated pixel data: " + name);
    return img;
}

inline void write_ppm(std::ostream& out, const RgbImage& img) {
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
}

inline void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    write_ppm(out, img);
    if (!out) throw DataError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// BMP reader (optional extra format): uncompressed 24/32-bit, bottom-up or
// top-down rows.
// ---------------------------------------------------------------------------

inline RgbImage read_bmp(std::istream& in, const std::string& name = "<stream>") {
    auto rd_u16 = [&] {
        unsigned char b[2];
        in.read(reinterpret_cast<char*>(b), 2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    };
    auto rd_u32 = [&] {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        return static_cast<std::uint32_t>(b[0] | (b[1] << 8) | (b[2] << 16) | (b[3] << 24));
    };
    if (rd_u16() != 0x4D42) throw DataError("bmp: bad signature: " + name);
    rd_u32();  // file size
    rd_u32();  // reserved
    const std::uint32_t pixel_offset = rd_u32();
    const std::uint32_t info_size = rd_u32();
    if (info_size < 40) throw DataError("bmp: unsupported header: " + name);
    const auto w = static_cast<std::int32_t>(rd_u32());
    const auto h_raw = static_cast<std::int32_t>(rd_u32());
    rd_u16();  // planes
    const std::uint16_t bpp = rd_u16();
    const std::uint32_t compression = rd_u32();
    if (!in) throw DataError("bmp: truncated header: " + name);
    if (w <= 0 || w > (1 << 24) || h_raw == 0 || h_raw == INT32_MIN ||
        std::abs(h_raw) > (1 << 24))
        throw DataError("bmp: bad dimensions: " + name);
    if ((bpp != 24 && bpp != 32) || compression != 0)
        throw DataError("bmp: only uncompressed 24/32-bit supported: " + name);

    const bool top_down = h_raw < 0;
    const int h = top_down ? -h_raw : h_raw;
    in.seekg(pixel_offset, std::ios::beg);
    const std::size_t bytes_pp = bpp / 8;
    const std::size_t row_bytes = (static_cast<std::size_t>(w) * bytes_pp + 3) & ~std::size_t{3};
    std::vector<std::uint8_t> row(row_bytes);

    RgbImage img(w, h);
    for (int r = 0; r < h; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row_bytes));
        if (static_cast<std::size_t>(in.gcount()) != row_bytes)
            throw DataError("bmp: truncated pixel data: " + name);
        const int dst = top_down ? r : h - 1 - r;
        for (int c = 0; c < w; ++c) {
            const std::uint8_t* px = row.data() + c * bytes_pp;  // stored as B,G,R[,A]
            img.at(dst, c, 0) = px[2];
            img.at(dst, c, 1) = px[1];
            img.at(dst, c, 2) = px[0];
        }
    }
    return img;
}

/// Decodes a PPM (P6) or BMP file into an 8-bit RGB image.
inline RgbImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    const int c0 = in.get();
    const int c1 = in.get();
    if (c0 == EOF) throw DataError("malformed header (empty file): " + path.string());
    in.seekg(0, std::ios::beg);
    if (c0 == 'P' && c1 == '6') return read_ppm(in, path.string());
    if (c0 == 'B' && c1 == 'M') return read_bmp(in, path.string());
    throw DataError("unsupported image format: " + path.string());
}

// ---------------------------------------------------------------------------
// Spatial tiling
// ---------------------------------------------------------------------------

/// Cuts the image into rows*cols disjoint tiles covering it exactly, returned
/// in row-major order. Boundary i sits at floor(i*height/rows) (resp. width),
/// so remainders land in the last row/column of tiles.
inline std::vector<RgbImage> split_grid(const RgbImage& img, int rows, int cols) {
    if (rows < 1 || cols < 1) throw ConfigError("split_grid: grid must be at least 1x1");
    if (img.height < rows || img.width < cols)
        throw ConfigError("split_grid: image smaller than grid");
    std::vector<RgbImage> tiles;
    tiles.reserve(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        const int r0 = static_cast<int>(static_cast<std::int64_t>(i) * img.height / rows);
        const int r1 = static_cast<int>(static_cast<std::int64_t>(i + 1) * img.height / rows);
        for (int j = 0; j < cols; ++j) {
            const int c0 = static_cast<int>(static_cast<std::int64_t>(j) * img.width / cols);
            const int c1 = static_cast<int>(static_cast<std::int64_t>(j + 1) * img.width / cols);
            RgbImage tile(c1 - c0, r1 - r0);
            for (int r = r0; r < r1; ++r)
                std::copy_n(&img.data[3 * (static_cast<std::size_t>(r) * img.width + c0)],
                            static_cast<std::size_t>(c1 - c0) * 3,
                            &tile.data[3 * (static_cast<std::size_t>(r - r0) * tile.width)]);
            tiles.push_back(std::move(tile));
        }
    }
    return tiles;
}

/// Per-channel intensity scaling (illumination change): v -> clamp(round(alpha*v)).
inline RgbImage scale_intensity(const RgbImage& img, double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("scale_intensity: alpha must be positive");
    RgbImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const long v = std::lround(alpha * img.data[i]);
        out.data[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
    }
    return out;
}

}  // namespace clbp
