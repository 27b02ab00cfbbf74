#ifndef HOPPERSTAT_CODEC_HPP
#define HOPPERSTAT_CODEC_HPP

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "hopperstat/errors.hpp"
#include "hopperstat/image.hpp"

namespace hopperstat {

namespace detail {

// --- binary PGM (P5, maxval <= 255) ---

inline bool is_pgm(std::span<const std::uint8_t> b) {
    return b.size() >= 2 && b[0] == 'P' && b[1] == '5';
}

inline bool is_png(std::span<const std::uint8_t> b) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

inline bool is_jpeg(std::span<const std::uint8_t> b) {
    return b.size() >= 2 && b[0] == 0xFF && b[1] == 0xD8;
}

// Reads the next header token, skipping whitespace and '#' comments.
inline long pgm_token(std::span<const std::uint8_t> b, std::size_t& pos) {
    while (pos < b.size()) {
        if (std::isspace(b[pos])) {
            ++pos;
        } else if (b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= b.size() || !std::isdigit(b[pos]))
        throw CorruptImage("malformed PGM header");
    long v = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
        v = v * 10 + (b[pos] - '0');
        if (v > 1'000'000'000L) throw CorruptImage("absurd PGM header value");
        ++pos;
    }
    return v;
}

inline GrayImage decode_pgm(std::span<const std::uint8_t> b) {
    std::size_t pos = 2; // past "P5"
    const long w = pgm_token(b, pos);
    const long h = pgm_token(b, pos);
    const long maxval = pgm_token(b, pos);
    if (w == 0 || h == 0)
        throw ZeroDimension("PGM declares " + std::to_string(w) + "x" + std::to_string(h));
    if (maxval <= 0 || maxval > 255)
        throw CorruptImage("only 8-bit PGM is supported, maxval=" + std::to_string(maxval));
    if (pos >= b.size() || !std::isspace(b[pos]))
        throw CorruptImage("missing whitespace after PGM maxval");
    ++pos; // single whitespace separates header from raster

    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (b.size() - pos < need)
        throw CorruptImage("PGM raster truncated: need " + std::to_string(need) +
                           " bytes, have " + std::to_string(b.size() - pos));
    std::vector<std::uint8_t> data(b.begin() + pos, b.begin() + pos + need);
    return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

// --- PNG via libpng's simplified API, forced to RGB so the BT.601
// conversion below is the only luma path ---

inline GrayImage decode_png(std::span<const std::uint8_t> b) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, b.data(), b.size()))
        throw CorruptImage(std::string("PNG: ") + image.message);

    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw CorruptImage("PNG: " + msg);
    }

    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    if (w == 0 || h == 0) throw ZeroDimension("PNG declares a zero dimension");

    std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = to_gray(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
    return GrayImage(w, h, std::move(data));
}

// --- JPEG via libjpeg; grayscale sources pass through untouched ---

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

inline void jpeg_silent_output(j_common_ptr) {}

inline GrayImage decode_jpeg(std::span<const std::uint8_t> b) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    jerr.pub.output_message = jpeg_silent_output;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw CorruptImage(std::string("JPEG: ") + jerr.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, b.data(), static_cast<unsigned long>(b.size()));
    jpeg_read_header(&cinfo, TRUE);

    const bool gray_source = cinfo.jpeg_color_space == JCS_GRAYSCALE;
    cinfo.out_color_space = gray_source ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    const int channels = cinfo.output_components;
    if (w == 0 || h == 0) {
        jpeg_destroy_decompress(&cinfo);
        throw ZeroDimension("JPEG declares a zero dimension");
    }

    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * channels);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h);
    while (cinfo.output_scanline < cinfo.output_height) {
        const std::size_t y = cinfo.output_scanline;
        JSAMPROW rows[1] = {row.data()};
        jpeg_read_scanlines(&cinfo, rows, 1);
        std::uint8_t* dst = data.data() + y * w;
        if (channels == 1) {
            std::memcpy(dst, row.data(), static_cast<std::size_t>(w));
        } else {
            for (int x = 0; x < w; ++x)
                dst[x] = to_gray(row[3 * x], row[3 * x + 1], row[3 * x + 2]);
        }
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return GrayImage(w, h, std::move(data));
}

} // namespace detail

/// Decodes PNG, JPEG, or binary PGM bytes into a grayscale raster.
/// Color inputs go through BT.601 luma; gray inputs pass through.
inline GrayImage decode_image(std::span<const std::uint8_t> bytes) {
    if (detail::is_pgm(bytes)) return detail::decode_pgm(bytes);
    if (detail::is_png(bytes)) return detail::decode_png(bytes);
    if (detail::is_jpeg(bytes)) return detail::decode_jpeg(bytes);
    throw UnsupportedFormat("magic bytes match none of PGM (P5), PNG, JPEG");
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open '" + path + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoFailure("read error on '" + path + "'");
    return bytes;
}

inline GrayImage decode_file(const std::string& path) {
    return decode_image(read_file_bytes(path));
}

/// Serializes a grayscale raster as binary PGM (P5, maxval 255).
inline std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    std::string header = "P5\n" + std::to_string(img.width()) + " " +
                         std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.data().begin(), img.data().end());
    return out;
}

inline void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoFailure("write error on '" + path + "'");
}

} // namespace hopperstat

#endif // HOPPERSTAT_CODEC_HPP
