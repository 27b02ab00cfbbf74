#ifndef HOPPERSTAT_IMAGE_HPP
#define HOPPERSTAT_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hopperstat/errors.hpp"

namespace hopperstat {

/// 8-bit luminance raster, row-major. Immutable after construction.
class GrayImage {
public:
    GrayImage(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width_ <= 0 || height_ <= 0)
            throw ZeroDimension("image dimensions must be >= 1, got " +
                                std::to_string(width_) + "x" + std::to_string(height_));
        if (data_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
            throw CorruptImage("pixel buffer size " + std::to_string(data_.size()) +
                               " does not match " + std::to_string(width_) + "x" +
                               std::to_string(height_));
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const std::vector<std::uint8_t>& data() const noexcept { return data_; }

    std::uint8_t at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

/// A named pixel segment with inclusive integer endpoints. Bounds are
/// checked against a concrete image at sampling time.
struct LineSpec {
    std::string name;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

/// Ordered pixel values read along one line.
struct LineSample {
    std::string line_name;
    std::vector<std::uint8_t> values;

    std::size_t count() const noexcept { return values.size(); }
};

/// BT.601 luma, rounded half away from zero.
inline std::uint8_t to_gray(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    double y = 0.299 * r + 0.587 * g + 0.114 * b;
    long v = std::lround(y);
    return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

/// Pixels visited by 8-connected Bresenham traversal from (x0,y0) to
/// (x1,y1), endpoints inclusive. Traversal direction is canonicalized
/// internally so that a reversed spec yields exactly the reversed pixel
/// sequence.
inline LineSample sample_line(const GrayImage& img, const LineSpec& spec) {
    auto check = [&](int x, int y) {
        if (!img.contains(x, y))
            throw OutOfBounds("line '" + spec.name + "' endpoint (" + std::to_string(x) +
                              "," + std::to_string(y) + ") outside " +
                              std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                              " image");
    };
    check(spec.x0, spec.y0);
    check(spec.x1, spec.y1);

    int ax = spec.x0, ay = spec.y0, bx = spec.x1, by = spec.y1;
    bool reversed = (bx < ax) || (bx == ax && by < ay);
    if (reversed) {
        std::swap(ax, bx);
        std::swap(ay, by);
    }

    int dx = std::abs(bx - ax);
    int dy = std::abs(by - ay);
    int sx = ax < bx ? 1 : -1;
    int sy = ay < by ? 1 : -1;
    int err = dx - dy;

    LineSample out;
    out.line_name = spec.name;
    out.values.reserve(static_cast<std::size_t>(std::max(dx, dy)) + 1);

    int x = ax, y = ay;
    while (true) {
        out.values.push_back(img.at(x, y));
        if (x == bx && y == by) break;
        int e2 = 2 * err;
        if (e2 > -dy) {
            err -= dy;
            x += sx;
        }
        if (e2 < dx) {
            err += dx;
            y += sy;
        }
    }

    if (reversed) std::reverse(out.values.begin(), out.values.end());
    return out;
}

} // namespace hopperstat

#endif // HOPPERSTAT_IMAGE_HPP
