#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <random>

#include "clbp/decoder.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace clbp;

namespace {

LbpMap map_with_codes(const std::vector<std::uint32_t>& codes, int iw, int ih, int P = 8,
                      int R = 1) {
    LbpMap map;
    map.width = iw + 2 * R;
    map.height = ih + 2 * R;
    map.margin = R;
    map.neighbors = P;
    map.codes = codes;
    return map;
}

std::vector<LbpMap> random_maps(int n, int iw, int ih, int P, std::mt19937_64& rng) {
    std::vector<LbpMap> maps;
    for (int j = 0; j < n; ++j) {
        std::vector<std::uint32_t> codes(static_cast<std::size_t>(iw) * ih);
        for (auto& c : codes) c = static_cast<std::uint32_t>(rng() & ((1u << P) - 1));
        maps.push_back(map_with_codes(codes, iw, ih, P));
    }
    return maps;
}

ChannelStack random_stack(int n, int w, int h, std::mt19937_64& rng) {
    ChannelStack stack;
    stack.kind = StackKind::RgbRss;
    for (int j = 0; j < n; ++j) {
        ChannelImage ch(w, h);
        for (double& v : ch.values) v = static_cast<double>(rng() % 4096) / 7.0;
        stack.channels.push_back(std::move(ch));
    }
    return stack;
}

}  // namespace

TEST_CASE("constant stack decodes onto the last plane only", "[decoder]") {
    std::vector<LbpMap> maps(6, map_with_codes(std::vector<std::uint32_t>(9, 255), 3, 3));
    const DecodedMaps dec = decode(maps);
    REQUIRE(dec.maps.size() == 64);
    for (std::size_t c = 0; c + 1 < 64; ++c)
        for (auto v : dec.maps[c]) CHECK(v == 0);
    for (auto v : dec.maps[63]) CHECK(v == 255);
}

TEST_CASE("two-channel worked example", "[decoder]") {
    // channel 1 code 0b00000001, channel 2 code 0b00000011:
    // dM^1 = 0b11 -> plane 4 gets bit 1; dM^2 = 0b01 -> plane 2 gets bit 2;
    // dM^3..8 = 0 -> plane 1 gets bits 3..8 = 252.
    const std::vector<LbpMap> maps = {map_with_codes({0b00000001}, 1, 1),
                                      map_with_codes({0b00000011}, 1, 1)};
    const DecodedMaps dec = decode(maps);
    REQUIRE(dec.maps.size() == 4);
    CHECK(dec.maps[0][0] == 252);
    CHECK(dec.maps[1][0] == 2);
    CHECK(dec.maps[2][0] == 0);
    CHECK(dec.maps[3][0] == 1);
}

TEST_CASE("identical channels light up only the first and last planes", "[decoder]") {
    std::mt19937_64 rng(8);
    std::vector<std::uint32_t> codes(16);
    for (auto& c : codes) c = static_cast<std::uint32_t>(rng() & 255u);
    const std::vector<LbpMap> maps(3, map_with_codes(codes, 4, 4));
    const DecodedMaps dec = decode(maps);
    for (std::size_t c = 1; c + 1 < dec.maps.size(); ++c)
        for (auto v : dec.maps[c]) CHECK(v == 0);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        CHECK(dec.maps.back()[i] == codes[i]);
        CHECK(dec.maps.front()[i] == (~codes[i] & 255u));
    }
}

TEST_CASE("bit and code conservation hold at every pixel", "[decoder]") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const auto maps = random_maps(n, 5, 4, 8, rng);
        const DecodedMaps dec = decode(maps);
        for (std::size_t i = 0; i < dec.interior_count(); ++i) {
            std::uint32_t code_sum = 0;
            int pop_sum = 0;
            for (const auto& plane : dec.maps) {
                code_sum += plane[i];
                pop_sum += std::popcount(plane[i]);
            }
            CHECK(code_sum == 255u);
            CHECK(pop_sum == 8);
        }
    }
}

TEST_CASE("decode matches the naive equation-by-equation reference", "[decoder]") {
    std::mt19937_64 rng(31);
    for (int n : {2, 3, 6}) {
        for (int trial = 0; trial < 30; ++trial) {
            const auto maps = random_maps(n, 6, 6, 8, rng);
            const DecodedMaps dec = decode(maps);
            const auto expected = oracle::naive_decode(maps, 8);
            REQUIRE(dec.maps.size() == expected.size());
            for (std::size_t c = 0; c < expected.size(); ++c) CHECK(dec.maps[c] == expected[c]);
        }
    }
}

TEST_CASE("swapping two channels permutes the planes by the bit swap", "[decoder]") {
    // For n=2 the plane index is the 2-bit pattern (ch1,ch2); swapping the
    // channels swaps the bits: 0b01 <-> 0b10, the rest stay.
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto maps = random_maps(2, 3, 3, 8, rng);
        const DecodedMaps ab = decode(maps);
        std::swap(maps[0], maps[1]);
        const DecodedMaps ba = decode(maps);
        CHECK(ba.maps[0] == ab.maps[0]);
        CHECK(ba.maps[1] == ab.maps[2]);
        CHECK(ba.maps[2] == ab.maps[1]);
        CHECK(ba.maps[3] == ab.maps[3]);
    }
}

TEST_CASE("decode validates its inputs", "[decoder]") {
    std::mt19937_64 rng(2);
    auto maps = random_maps(2, 3, 3, 8, rng);
    CHECK_THROWS_AS(decode(std::vector<LbpMap>{}), ConfigError);
    auto mismatched = maps;
    mismatched[1] = map_with_codes(std::vector<std::uint32_t>(16, 0), 4, 4);
    CHECK_THROWS_AS(decode(mismatched), ConfigError);
    auto nine = random_maps(9, 3, 3, 8, rng);
    CHECK_THROWS_AS(decode(nine), ConfigError);
}

TEST_CASE("histograms of a constant image follow the counting identity", "[decoder]") {
    // Planes 1..63 are all-zero, so each histograms to bin 0; plane 64 is
    // all-255. Every plane contributes mass 1/64.
    const FeatureVector feat =
        extract(synth::flat_image(10, 9, 120, 40, 200), StackKind::RgbRss);
    REQUIRE(feat.dim() == 16384);
    CHECK(feat.values[63 * 256 + 255] == Catch::Approx(1.0 / 64.0).epsilon(1e-12));
    for (int c = 1; c <= 63; ++c)
        CHECK(feat.values[(c - 1) * 256] == Catch::Approx(1.0 / 64.0).epsilon(1e-12));
    double sum = 0.0;
    for (double v : feat.values) sum += v;
    CHECK(std::fabs(sum - 1.0) < 1e-9);
    std::size_t nonzero = 0;
    for (double v : feat.values) nonzero += v != 0.0;
    CHECK(nonzero == 64);
}

TEST_CASE("feature vectors always sum to one", "[decoder]") {
    std::mt19937_64 rng(3);
    for (StackKind kind : {StackKind::Rgb, StackKind::Rss, StackKind::RgbRss}) {
        RgbImage img(12, 8);
        for (auto& b : img.data) b = static_cast<std::uint8_t>(rng());
        const FeatureVector feat = extract(img, kind);
        double sum = 0.0;
        for (double v : feat.values) sum += v;
        CHECK(std::fabs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("4x4 image histograms count the four interior pixels", "[decoder]") {
    std::mt19937_64 rng(13);
    RgbImage img(4, 4);
    for (auto& b : img.data) b = static_cast<std::uint8_t>(rng());
    const ChannelStack stack = build_stack(img, StackKind::RgbRss, {1.0});
    std::vector<LbpMap> maps;
    for (const auto& ch : stack.channels) maps.push_back(lbp_channel(ch));
    const DecodedMaps dec = decode(maps);
    REQUIRE(dec.interior_count() == 4);
    const FeatureVector feat = histograms(dec, StackKind::RgbRss, 1.0);

    // Brute force over the 4 interior pixels against the library histogram.
    for (std::size_t c = 0; c < dec.maps.size(); ++c) {
        const auto h = oracle::naive_histogram(dec.maps[c], 8);
        for (std::size_t k = 0; k < h.size(); ++k) {
            const double expected = h[k] / 64.0;
            CHECK(feat.values[c * 256 + k] == Catch::Approx(expected).margin(1e-15));
            const double quarters = h[k] * 4.0;
            CHECK(quarters == std::floor(quarters));  // counts in {0,1,2,3,4}
        }
    }
}

TEST_CASE("extract dimensions follow the space", "[decoder]") {
    std::mt19937_64 rng(77);
    RgbImage img(8, 8);
    for (auto& b : img.data) b = static_cast<std::uint8_t>(rng());
    CHECK(extract(img, StackKind::RgbRss).dim() == 16384);
    CHECK(extract(img, StackKind::Rgb).dim() == 2048);
    CHECK(extract(img, StackKind::Rss).dim() == 2048);
    CHECK(extract(img, StackKind::Rgb).desc.n == 3);
    CHECK(extract(img, StackKind::RgbRss).desc.n == 6);
}

TEST_CASE("extraction is deterministic", "[decoder]") {
    std::mt19937_64 rng(123);
    RgbImage img(16, 12);
    for (auto& b : img.data) b = static_cast<std::uint8_t>(rng());
    const RgbImage copy = img;
    const FeatureVector a = extract(img, StackKind::RgbRss);
    const FeatureVector b = extract(copy, StackKind::RgbRss);
    CHECK(a.values == b.values);
}

TEST_CASE("pure scaling moves the feature only through xi", "[decoder]") {
    // Scale the channels in float, without the 8-bit clamp/round: the RGB half
    // of the rgb+rss feature is exactly invariant (order comparisons), and the
    // RSS half moves only through the xi guard, vanishing as xi -> 0.
    std::mt19937_64 rng(91);
    const double xi = 1e-6;
    for (double alpha : {0.5, 2.0}) {
        RgbImage img(10, 10);
        for (auto& b : img.data) b = static_cast<std::uint8_t>(8 + rng() % 240);

        const auto stack_for = [&](double scale) {
            ChannelStack stack;
            stack.kind = StackKind::RgbRss;
            for (int ch = 0; ch < 6; ++ch) stack.channels.emplace_back(img.width, img.height);
            for (std::size_t i = 0; i < img.pixel_count(); ++i) {
                const double r = scale * img.data[3 * i];
                const double g = scale * img.data[3 * i + 1];
                const double b = scale * img.data[3 * i + 2];
                stack.channels[0].values[i] = r;
                stack.channels[1].values[i] = g;
                stack.channels[2].values[i] = b;
                stack.channels[3].values[i] = (std::abs(r - g) + std::abs(r - b)) / (r + xi);
                stack.channels[4].values[i] = (std::abs(g - r) + std::abs(g - b)) / (g + xi);
                stack.channels[5].values[i] = (std::abs(b - r) + std::abs(b - g)) / (b + xi);
            }
            return stack;
        };

        const auto feature_of = [&](const ChannelStack& stack) {
            std::vector<LbpMap> maps;
            for (const auto& ch : stack.channels) maps.push_back(lbp_channel(ch));
            return histograms(decode(maps), StackKind::RgbRss, xi);
        };

        const FeatureVector base = feature_of(stack_for(1.0));
        const FeatureVector scaled = feature_of(stack_for(alpha));
        double l1 = 0.0;
        for (std::size_t i = 0; i < base.dim(); ++i)
            l1 += std::fabs(base.values[i] - scaled.values[i]);
        CHECK(l1 <= 1e-3);
    }
}

TEST_CASE("full pipeline against the naive reference on random stacks", "[decoder]") {
    std::mt19937_64 rng(55);
    for (int n : {2, 3, 6}) {
        for (int trial = 0; trial < 10; ++trial) {
            const ChannelStack stack = random_stack(n, 8, 8, rng);
            std::vector<LbpMap> maps;
            for (const auto& ch : stack.channels) maps.push_back(lbp_channel(ch));
            std::vector<LbpMap> naive_maps;
            for (const auto& ch : stack.channels) {
                LbpMap m = maps[0];
                m.codes = oracle::naive_lbp(ch, 8, 1);
                naive_maps.push_back(std::move(m));
            }
            const DecodedMaps dec = decode(maps);
            const auto expected = oracle::naive_decode(naive_maps, 8);
            for (std::size_t c = 0; c < expected.size(); ++c) CHECK(dec.maps[c] == expected[c]);
        }
    }
}
