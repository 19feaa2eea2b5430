#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "scenestat/error.hpp"

namespace scenestat {

// 8-bit RGB raster, row-major, channels interleaved.
struct RgbFrame {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // 3 * width * height

    bool valid() const {
        return width > 0 && height > 0 &&
               pixels.size() == static_cast<size_t>(width) * height * 3;
    }
};

// Normalized single-channel raster; every value in [0, 1].
struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // width * height

    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }

    bool valid() const {
        return width > 0 && height > 0 &&
               pixels.size() == static_cast<size_t>(width) * height;
    }

    bool operator==(const GrayFrame&) const = default;
};

struct CropRect {
    int left = 0;
    int top = 0;
    int width = 0;
    int height = 0;

    bool operator==(const CropRect&) const = default;
};

using AnyFrame = std::variant<GrayFrame, RgbFrame>;

// Parses a complete P2/P3/P5/P6 netpbm payload (maxval <= 255). P2/P5 yield
// GrayFrame with values scaled by 1/maxval, P3/P6 yield RgbFrame.
AnyFrame parse_netpbm(std::span<const uint8_t> bytes);

// Encodes a GrayFrame as binary P5 with maxval 255; values quantized
// round-half-up so golden files are bit-exact.
std::vector<uint8_t> encode_netpbm(const GrayFrame& frame);

// BT.601 luma: (0.299 R + 0.587 G + 0.114 B) / 255.
GrayFrame to_gray(const RgbFrame& frame);

// Bilinear resize with pixel-center alignment: source coordinate of output
// pixel (x, y) is ((x+0.5)*sw/ow - 0.5, (y+0.5)*sh/oh - 0.5), clamped to the
// source rectangle. Resizing to the input dimensions is bit-identical.
GrayFrame resize_bilinear(const GrayFrame& frame, int out_width, int out_height);

GrayFrame crop(const GrayFrame& frame, const CropRect& rect);

}  // namespace scenestat
