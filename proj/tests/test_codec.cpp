#include <doctest.h>

#include "hopperstat/codec.hpp"
#include "test_util.hpp"

using namespace hopperstat;

namespace {
std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
}
} // namespace

TEST_CASE("PGM gray passthrough") {
    std::vector<std::uint8_t> pgm = bytes_of("P5\n2 2\n255\n");
    for (std::uint8_t v : {0, 64, 128, 255}) pgm.push_back(v);
    const auto img = decode_image(pgm);
    CHECK(img.width() == 2);
    CHECK(img.height() == 2);
    CHECK(img.data() == std::vector<std::uint8_t>{0, 64, 128, 255});
}

TEST_CASE("PGM header comments and errors") {
    std::vector<std::uint8_t> pgm = bytes_of("P5\n# camera 3\n1 1\n255\n");
    pgm.push_back(42);
    CHECK(decode_image(pgm).at(0, 0) == 42);

    CHECK_THROWS_AS(decode_image(bytes_of("P5\n0 4\n255\n")), ZeroDimension);
    CHECK_THROWS_AS(decode_image(bytes_of("P5\n2 2\n65535\n")), CorruptImage);
    CHECK_THROWS_AS(decode_image(bytes_of("P5\n2 2\n255\nX")), CorruptImage); // truncated
}

TEST_CASE("unrecognized magic bytes") {
    CHECK_THROWS_AS(decode_image(bytes_of("BM000000")), UnsupportedFormat);
    CHECK_THROWS_AS(decode_image(bytes_of("P6\n1 1\n255\nabc")), UnsupportedFormat);
}

TEST_CASE("PNG 1x1 white decodes to 255") {
    const auto png = testutil::encode_png_rgb(1, 1, {255, 255, 255});
    const auto img = decode_image(png);
    CHECK(img.width() == 1);
    CHECK(img.at(0, 0) == 255);
}

TEST_CASE("PNG 16x16 uniform red decodes to 76 everywhere") {
    std::vector<std::uint8_t> rgb;
    for (int i = 0; i < 16 * 16; ++i) {
        rgb.push_back(255);
        rgb.push_back(0);
        rgb.push_back(0);
    }
    const auto img = decode_image(testutil::encode_png_rgb(16, 16, rgb));
    for (auto v : img.data()) CHECK(v == 76);
}

TEST_CASE("corrupt PNG is rejected") {
    auto png = testutil::encode_png_rgb(4, 4, std::vector<std::uint8_t>(48, 100));
    png.resize(20); // keep the signature, drop the rest
    CHECK_THROWS_AS(decode_image(png), CorruptImage);
}

TEST_CASE("grayscale JPEG round-trips approximately") {
    std::vector<std::uint8_t> gray(32 * 32, 120);
    const auto jpg = testutil::encode_jpeg_gray(32, 32, gray);
    const auto img = decode_image(jpg);
    CHECK(img.width() == 32);
    CHECK(img.height() == 32);
    for (auto v : img.data()) CHECK(std::abs(static_cast<int>(v) - 120) <= 2);
}

TEST_CASE("progressive JPEG decodes") {
    std::vector<std::uint8_t> gray(32 * 32);
    for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = static_cast<std::uint8_t>((i * 7) & 0xFF);
    const auto jpg = testutil::encode_jpeg_gray(32, 32, gray, /*progressive=*/true);
    const auto img = decode_image(jpg);
    CHECK(img.width() == 32);
    CHECK(img.height() == 32);
}

TEST_CASE("truncated JPEG is rejected") {
    auto jpg = testutil::encode_jpeg_gray(16, 16, std::vector<std::uint8_t>(256, 50));
    jpg.resize(4);
    CHECK_THROWS_AS(decode_image(jpg), CorruptImage);
}

TEST_CASE("PGM encode/decode round-trip is identity") {
    std::mt19937 rng(11);
    std::vector<std::uint8_t> data(40 * 25);
    for (auto& v : data) v = static_cast<std::uint8_t>(rng() & 0xFF);
    const GrayImage img(40, 25, data);
    const auto img2 = decode_image(encode_pgm(img));
    CHECK(img2.width() == 40);
    CHECK(img2.height() == 25);
    CHECK(img2.data() == data);
}

TEST_CASE("file helpers report I/O failures") {
    CHECK_THROWS_AS(read_file_bytes("/nonexistent/hopperstat.pgm"), IoFailure);
    CHECK_THROWS_AS(
        write_file_bytes("/nonexistent/dir/out.pgm", std::vector<std::uint8_t>{1}),
        IoFailure);
}
