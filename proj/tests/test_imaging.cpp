#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fidnav/imaging.hpp"
#include "fidnav/rng.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <string>
#include <vector>

using namespace fidnav;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

Image random_image(int w, int h, Rng& rng) {
    Image img(w, h);
    for (auto& p : img.pixels) p = std::uint8_t(rng.below(256));
    return img;
}

}  // namespace

TEST_CASE("load_pnm parses binary P5") {
    auto data = bytes_of("P5 2 1 255\n");
    data.push_back(0);
    data.push_back(255);
    const Image img = load_pnm(data);
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.pixels == std::vector<std::uint8_t>{0, 255});
}

TEST_CASE("load_pnm parses ASCII P2") {
    const Image img = load_pnm(bytes_of("P2 1 1 255\n128"));
    CHECK(img.width == 1);
    CHECK(img.height == 1);
    CHECK(img.pixels[0] == 128);
}

TEST_CASE("load_pnm converts P6 color via luma") {
    // round(0.299 * 255) = round(76.245) = 76
    auto data = bytes_of("P6 1 1 255\n");
    data.insert(data.end(), {255, 0, 0});
    CHECK(load_pnm(data).pixels[0] == 76);
    CHECK(load_pnm(bytes_of("P3 1 1 255\n0 255 0")).pixels[0] == 150);  // round(149.685)
}

TEST_CASE("load_pnm accepts header comments") {
    auto data = bytes_of("P5\n# a comment\n2 1\n# another\n255\n");
    data.push_back(7);
    data.push_back(9);
    const Image img = load_pnm(data);
    CHECK(img.pixels == std::vector<std::uint8_t>{7, 9});
}

TEST_CASE("load_pnm rejects malformed input with byte offsets") {
    CHECK_THROWS_AS(load_pnm(bytes_of("Q5 1 1 255\n")), PnmError);
    CHECK_THROWS_AS(load_pnm(bytes_of("P7 1 1 255\n")), PnmError);

    SUBCASE("maxval above 255") {
        try {
            load_pnm(bytes_of("P2 1 1 65535\n128"));
            FAIL("expected PnmError");
        } catch (const PnmError& e) {
            CHECK(e.offset() == 7);  // the maxval token
        }
    }
    SUBCASE("truncated raster") {
        auto data = bytes_of("P5 2 2 255\n");
        data.push_back(1);  // 3 bytes short
        CHECK_THROWS_AS(load_pnm(data), PnmError);
    }
    SUBCASE("non-numeric header") {
        CHECK_THROWS_AS(load_pnm(bytes_of("P5 two 1 255\n")), PnmError);
    }
}

TEST_CASE("save_pnm emits canonical P5") {
    const Image img(1, 1, 0);
    const auto expected = [] {
        auto v = bytes_of("P5\n1 1\n255\n");
        v.push_back(0);
        return v;
    }();
    CHECK(save_pnm(img) == expected);
}

TEST_CASE("save/load round-trip is the identity") {
    Image small(2, 2);
    small.pixels = {0, 64, 128, 255};
    CHECK(load_pnm(save_pnm(small)) == small);

    Rng rng(101);
    for (int i = 0; i < 20; ++i) {
        const Image img = random_image(16, 16, rng);
        CHECK(load_pnm(save_pnm(img)) == img);
    }
}

TEST_CASE("binarize_fixed thresholds by polarity") {
    Image img(2, 1);
    img.pixels = {200, 100};
    const BinaryImage bright = binarize_fixed(img, 128, Polarity::Bright);
    CHECK(bright.get(0, 0));
    CHECK_FALSE(bright.get(1, 0));

    SUBCASE("Bright and Dark are elementwise complements") {
        Rng rng(7);
        for (int trial = 0; trial < 10; ++trial) {
            const Image r = random_image(17, 11, rng);
            const std::uint8_t t = std::uint8_t(rng.below(256));
            const BinaryImage b = binarize_fixed(r, t, Polarity::Bright);
            const BinaryImage d = binarize_fixed(r, t, Polarity::Dark);
            for (std::size_t i = 0; i < b.mask.size(); ++i)
                CHECK(b.mask[i] == (d.mask[i] ? 0 : 1));
        }
    }
}

TEST_CASE("binarize_adaptive on uniform images follows offset sign") {
    const Image img(9, 9, 100);
    CHECK(binarize_adaptive(img, 3, 10).count_foreground() == 81);   // 100 >= 90
    CHECK(binarize_adaptive(img, 3, -10).count_foreground() == 0);   // 100 < 110
    CHECK(binarize_adaptive(img, 3, 0).count_foreground() == 81);    // x >= x
}

TEST_CASE("binarize_adaptive validates the window") {
    const Image img(8, 8, 100);
    CHECK_THROWS_AS(binarize_adaptive(img, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(binarize_adaptive(img, 9, 0), std::invalid_argument);
    CHECK_THROWS_AS(binarize_adaptive(img, 1, 0), std::invalid_argument);
}

TEST_CASE("binarize_adaptive recovers a strip under an illumination gradient") {
    const int w = 64, h = 64;
    Image base(w, h, 60);
    for (int y = 0; y < h; ++y)
        for (int x = 28; x <= 35; ++x) base.at(x, y) = 200;

    Image lit = base;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            lit.at(x, y) = std::uint8_t(lit.at(x, y) + (x * 20) / (w - 1));

    const BinaryImage expected = binarize_fixed(base, 128, Polarity::Bright);
    const BinaryImage got = binarize_adaptive(lit, 15, -45);
    CHECK(got == expected);
}

TEST_CASE("connected_components basic shapes") {
    SUBCASE("all background") {
        CHECK(connected_components(BinaryImage(16, 16)).empty());
    }
    SUBCASE("single 3x3 block") {
        BinaryImage bin(16, 16);
        for (int y = 5; y <= 7; ++y)
            for (int x = 5; x <= 7; ++x) bin.set(x, y, true);
        const auto blobs = connected_components(bin);
        REQUIRE(blobs.size() == 1);
        CHECK(blobs[0].area == 9);
        CHECK(blobs[0].cx == doctest::Approx(6.0));
        CHECK(blobs[0].cy == doctest::Approx(6.0));
        CHECK(blobs[0].x_min == 5);
        CHECK(blobs[0].y_max == 7);
        CHECK(blobs[0].label == 1);
    }
    SUBCASE("diagonal pixels join under 8-connectivity") {
        BinaryImage bin(4, 4);
        bin.set(0, 0, true);
        bin.set(1, 1, true);
        bin.set(2, 2, true);
        const auto blobs = connected_components(bin);
        REQUIRE(blobs.size() == 1);
        CHECK(blobs[0].area == 3);
    }
}

TEST_CASE("connected_components matches the flood-fill oracle") {
    Rng rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        const double density = 0.15 + 0.6 * rng.uniform01();
        const BinaryImage bin = test::random_mask(64, 64, density, rng);
        for (const std::int64_t min_area : {std::int64_t{1}, std::int64_t{5}}) {
            const auto got = connected_components(bin, min_area);
            const auto want = test::flood_fill_components(bin, min_area);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].area == want[i].area);
                CHECK(got[i].cx == want[i].cx);
                CHECK(got[i].cy == want[i].cy);
                CHECK(got[i].x_min == want[i].x_min);
                CHECK(got[i].x_max == want[i].x_max);
                CHECK(got[i].y_min == want[i].y_min);
                CHECK(got[i].y_max == want[i].y_max);
            }
        }
    }
}

TEST_CASE("connected_components labels and area accounting") {
    Rng rng(505);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryImage bin = test::random_mask(48, 48, 0.4, rng);
        const auto blobs = connected_components(bin, 1);
        std::int64_t total = 0;
        for (std::size_t i = 0; i < blobs.size(); ++i) {
            CHECK(blobs[i].label == int(i) + 1);  // contiguous from 1
            CHECK(blobs[i].x_min <= blobs[i].cx);
            CHECK(blobs[i].cx <= blobs[i].x_max);
            CHECK(blobs[i].y_min <= blobs[i].cy);
            CHECK(blobs[i].cy <= blobs[i].y_max);
            const std::int64_t box = std::int64_t(blobs[i].x_max - blobs[i].x_min + 1) *
                                     (blobs[i].y_max - blobs[i].y_min + 1);
            CHECK(blobs[i].area <= box);
            total += blobs[i].area;
        }
        CHECK(total == bin.count_foreground());  // equality at min_area 1

        const auto filtered = connected_components(bin, 5);
        std::int64_t filtered_total = 0;
        for (const auto& b : filtered) {
            CHECK(b.area >= 5);
            filtered_total += b.area;
        }
        CHECK(filtered_total <= bin.count_foreground());
    }
}

TEST_CASE("blob ordering is by bbox (y_min, x_min)") {
    BinaryImage bin(20, 20);
    bin.set(10, 2, true);                         // topmost
    for (int x = 2; x <= 4; ++x) bin.set(x, 5, true);
    bin.set(15, 5, true);
    const auto blobs = connected_components(bin);
    REQUIRE(blobs.size() == 3);
    CHECK(blobs[0].y_min == 2);
    CHECK(blobs[1].x_min == 2);
    CHECK(blobs[2].x_min == 15);
}
