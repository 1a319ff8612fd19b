#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

#include "clbp/error.hpp"
#include "clbp/image.hpp"

namespace clbp {

/// Gaussian corruption request. snr_db = +infinity disables the noise.
struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;

    bool enabled() const { return !(std::isinf(snr_db) && snr_db > 0.0); }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(splitmix64(seed) ^ splitmix64(salt + 1));
}

/// Standard-normal sampler over mt19937_64 via Box-Muller. mt19937_64 output
/// is pinned by the standard, so sequences are reproducible everywhere
/// (std::normal_distribution is not).
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return mag * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace detail

/// Signal power of the clean image: mean of squared intensities over all
/// pixels and all three channels.
inline double signal_power(const RgbImage& img) {
    if (img.empty()) throw DataError("signal_power: empty image");
    double sum = 0.0;
    for (std::uint8_t v : img.data) sum += static_cast<double>(v) * v;
    return sum / static_cast<double>(img.data.size());
}

/// Noise variance for a target SNR: sigma^2 = Ps / 10^(snr_db/10).
inline double noise_variance(double ps, double snr_db) {
    return ps / std::pow(10.0, snr_db / 10.0);
}

/// Adds i.i.d. zero-mean Gaussian noise calibrated to spec.snr_db. Samples are
/// drawn pixel by pixel in row-major order, channels r,g,b within each pixel;
/// each component is rounded to nearest and clamped to [0, 255]. Pure function
/// of (image, snr_db, seed).
inline RgbImage add_gaussian_noise(const RgbImage& img, const NoiseSpec& spec) {
    if (img.empty()) throw DataError("add_gaussian_noise: empty image");
    if (!spec.enabled()) return img;
    if (!std::isfinite(spec.snr_db))
        throw ConfigError("add_gaussian_noise: snr_db must be finite or +inf");  // NaN, -inf

    const double sigma = std::sqrt(noise_variance(signal_power(img), spec.snr_db));
    detail::GaussianSampler gauss(spec.seed);
    RgbImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const long v = std::lround(img.data[i] + sigma * gauss());
        out.data[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
    }
    return out;
}

}  // namespace clbp
