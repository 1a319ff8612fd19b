#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "clbp/lbp.hpp"
#include "oracles.hpp"

using namespace clbp;

namespace {

ChannelImage random_channel(int w, int h, std::mt19937_64& rng, bool integer_valued = false) {
    ChannelImage ch(w, h);
    for (double& v : ch.values)
        v = integer_valued ? static_cast<double>(rng() % 256)
                           : static_cast<double>(rng() % (1u << 20)) / 977.0;
    return ch;
}

}  // namespace

TEST_CASE("constant channel codes to all-ones", "[lbp]") {
    ChannelImage ch(6, 5);
    for (double& v : ch.values) v = 42.0;
    const LbpMap map = lbp_channel(ch, {8, 1});
    REQUIRE(map.codes.size() == static_cast<std::size_t>(4) * 3);
    for (auto code : map.codes) CHECK(code == 255);

    ChannelImage ch12(8, 8);
    for (double& v : ch12.values) v = -3.5;
    const LbpMap map12 = lbp_channel(ch12, {12, 2});
    for (auto code : map12.codes) CHECK(code == (1u << 12) - 1);
}

TEST_CASE("worked 3x3 neighborhood gives code 181", "[lbp]") {
    // center 100; E=100, NE=99, N=150, NW=20, W=100, SW=101, S=0, SE=255,
    // embedded in a 4x4 host (the minimum size the contract accepts).
    ChannelImage ch(4, 4);
    for (double& v : ch.values) v = 7.0;
    ch.at(1, 1) = 100;
    ch.at(1, 2) = 100;  // E  -> bit 0 (>=)
    ch.at(0, 2) = 99;   // NE -> 0
    ch.at(0, 1) = 150;  // N  -> bit 2
    ch.at(0, 0) = 20;   // NW -> 0
    ch.at(1, 0) = 100;  // W  -> bit 4
    ch.at(2, 0) = 101;  // SW -> bit 5
    ch.at(2, 1) = 0;    // S  -> 0
    ch.at(2, 2) = 255;  // SE -> bit 7
    const LbpMap map = lbp_channel(ch, {8, 1});
    REQUIRE(map.codes.size() == 4);
    CHECK(map.at(1, 1) == 181);
}

TEST_CASE("channel too small for the radius is rejected", "[lbp]") {
    ChannelImage tiny(3, 3);
    CHECK_THROWS_AS(lbp_channel(tiny, {8, 1}), ConfigError);  // needs 2R+2 = 4
    ChannelImage minimal(4, 4);
    const LbpMap map = lbp_channel(minimal, {8, 1});
    CHECK(map.codes.size() == 4);
}

TEST_CASE("codes are invariant under offset and positive scaling", "[lbp]") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const ChannelImage ch = random_channel(9, 7, rng, trial % 2 == 0);
        const LbpMap base = lbp_channel(ch, {8, 1});

        ChannelImage shifted = ch;
        const double offset = static_cast<double>(rng() % 1000) - 500.0;
        for (double& v : shifted.values) v += offset;
        CHECK(lbp_channel(shifted, {8, 1}).codes == base.codes);

        ChannelImage scaled = ch;
        const double alpha = 0.25 + static_cast<double>(rng() % 100) / 13.0;
        for (double& v : scaled.values) v *= alpha;
        CHECK(lbp_channel(scaled, {8, 1}).codes == base.codes);
    }
}

TEST_CASE("fast path matches the naive reference exactly", "[lbp]") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const ChannelImage ch = random_channel(8, 8, rng, trial % 3 == 0);
        const LbpMap map = lbp_channel(ch, {8, 1});
        CHECK(map.codes == oracle::naive_lbp(ch, 8, 1));
    }
}

TEST_CASE("bilinear path matches the naive reference exactly", "[lbp]") {
    std::mt19937_64 rng(77);
    for (auto [p, r] : {std::pair{4, 1}, {8, 2}, {16, 2}, {12, 3}}) {
        for (int trial = 0; trial < 20; ++trial) {
            const ChannelImage ch = random_channel(2 * r + 6, 2 * r + 5, rng);
            const LbpMap map = lbp_channel(ch, {p, r});
            CHECK(map.codes == oracle::naive_lbp(ch, p, r));
            for (auto code : map.codes) CHECK(code < (1u << p));
        }
    }
}

TEST_CASE("parameter validation", "[lbp]") {
    ChannelImage ch(8, 8);
    CHECK_THROWS_AS(lbp_channel(ch, {1, 1}), ConfigError);
    CHECK_THROWS_AS(lbp_channel(ch, {25, 1}), ConfigError);
    CHECK_THROWS_AS(lbp_channel(ch, {8, 0}), ConfigError);
    CHECK_THROWS_AS(lbp_channel(ch, {8, 4}), ConfigError);  // needs 2R+2 = 10
}
