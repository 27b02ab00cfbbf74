#include <doctest.h>

#include <random>

#include "hopperstat/image.hpp"
#include "test_util.hpp"

using namespace hopperstat;

TEST_CASE("to_gray spot values") {
    CHECK(to_gray(0, 0, 0) == 0);
    CHECK(to_gray(255, 255, 255) == 255);
    CHECK(to_gray(0, 255, 0) == 150); // round(0.587 * 255)
    CHECK(to_gray(255, 0, 0) == 76);  // round(0.299 * 255)
}

TEST_CASE("to_gray fixes the gray diagonal and is monotone per channel") {
    for (int v = 0; v <= 255; ++v)
        CHECK(to_gray(static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v),
                      static_cast<std::uint8_t>(v)) == v);

    std::mt19937 rng(7);
    std::uniform_int_distribution<int> dist(0, 254);
    for (int i = 0; i < 500; ++i) {
        const std::uint8_t r = static_cast<std::uint8_t>(dist(rng));
        const std::uint8_t g = static_cast<std::uint8_t>(dist(rng));
        const std::uint8_t b = static_cast<std::uint8_t>(dist(rng));
        CHECK(to_gray(r + 1, g, b) >= to_gray(r, g, b));
        CHECK(to_gray(r, g + 1, b) >= to_gray(r, g, b));
        CHECK(to_gray(r, g, b + 1) >= to_gray(r, g, b));
    }
}

TEST_CASE("GrayImage rejects bad construction") {
    CHECK_THROWS_AS(GrayImage(0, 4, {}), ZeroDimension);
    CHECK_THROWS_AS(GrayImage(4, 0, {}), ZeroDimension);
    CHECK_THROWS_AS(GrayImage(2, 2, {1, 2, 3}), CorruptImage);
}

TEST_CASE("sample_line horizontal run on constant image") {
    const auto img = testutil::constant_image(8, 8, 9);
    const auto s = sample_line(img, {"L", 0, 0, 3, 0});
    CHECK(s.values == std::vector<std::uint8_t>{9, 9, 9, 9});
    CHECK(s.count() == 4);
}

TEST_CASE("sample_line degenerate line yields one pixel") {
    const auto img = testutil::constant_image(8, 8, 3);
    const auto s = sample_line(img, {"L", 2, 5, 2, 5});
    CHECK(s.count() == 1);
}

TEST_CASE("sample_line diagonal on 3x3 visits the diagonal") {
    std::vector<std::uint8_t> data(9);
    for (std::size_t i = 0; i < 9; ++i) data[i] = static_cast<std::uint8_t>(i);
    const GrayImage img(3, 3, std::move(data));
    const auto s = sample_line(img, {"L", 0, 0, 2, 2});
    // pixels (0,0), (1,1), (2,2) -> indices 0, 4, 8
    CHECK(s.values == std::vector<std::uint8_t>{0, 4, 8});
}

TEST_CASE("sample_line rejects out-of-bounds endpoints") {
    const auto img = testutil::constant_image(4, 4, 0);
    CHECK_THROWS_AS(sample_line(img, {"L", 0, 0, 4, 0}), OutOfBounds);
    CHECK_THROWS_AS(sample_line(img, {"L", -1, 0, 2, 0}), OutOfBounds);
    CHECK_THROWS_WITH_AS(sample_line(img, {"L1", 0, 0, 0, 9}), doctest::Contains("(0,9)"),
                         OutOfBounds);
}

TEST_CASE("sample_line pixel count and reversal, randomized") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> coord(0, 31);
    std::vector<std::uint8_t> data(32 * 32);
    for (auto& v : data) v = static_cast<std::uint8_t>(rng() & 0xFF);
    const GrayImage img(32, 32, std::move(data));

    for (int i = 0; i < 1000; ++i) {
        LineSpec spec{"L", coord(rng), coord(rng), coord(rng), coord(rng)};
        const auto fwd = sample_line(img, spec);
        const std::size_t expect =
            static_cast<std::size_t>(
                std::max(std::abs(spec.x1 - spec.x0), std::abs(spec.y1 - spec.y0))) + 1;
        CHECK(fwd.count() == expect);

        LineSpec rev{"L", spec.x1, spec.y1, spec.x0, spec.y0};
        auto bwd = sample_line(img, rev);
        std::reverse(bwd.values.begin(), bwd.values.end());
        CHECK(bwd.values == fwd.values);
    }
}

TEST_CASE("sample_line on constant image is constant for any spec") {
    const auto img = testutil::constant_image(16, 16, 77);
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> coord(0, 15);
    for (int i = 0; i < 200; ++i) {
        const auto s = sample_line(img, {"L", coord(rng), coord(rng), coord(rng), coord(rng)});
        for (auto v : s.values) CHECK(v == 77);
    }
}
