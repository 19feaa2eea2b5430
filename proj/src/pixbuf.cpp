#include "scenestat/pixbuf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace scenestat {

namespace {

// Incremental reader over the raw payload. Header tokens may be separated by
// any whitespace and '#' comments per the netpbm specification.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

    // Next header token, skipping whitespace and comments.
    std::string token() {
        skip_space_and_comments();
        std::string tok;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) {
            tok.push_back(static_cast<char>(bytes_[pos_++]));
        }
        if (tok.empty()) raise(ErrorCode::malformed_header, "unexpected end of header");
        return tok;
    }

    int int_token(const char* what) {
        const std::string tok = token();
        size_t consumed = 0;
        long value = 0;
        try {
            value = std::stol(tok, &consumed);
        } catch (const std::exception&) {
            raise(ErrorCode::malformed_header, std::string("bad ") + what + ": '" + tok + "'");
        }
        if (consumed != tok.size() || value < 0) {
            raise(ErrorCode::malformed_header, std::string("bad ") + what + ": '" + tok + "'");
        }
        return static_cast<int>(value);
    }

    // Consumes the single whitespace byte that separates the header from a
    // binary raster.
    void expect_raster_separator() {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
            raise(ErrorCode::malformed_header, "missing whitespace before raster");
        }
        ++pos_;
    }

    std::span<const uint8_t> rest() const { return bytes_.subspan(pos_); }

private:
    static bool is_space(uint8_t c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const uint8_t> bytes_;
    size_t pos_ = 0;
};

std::vector<int> read_ascii_samples(ByteReader& reader, size_t count) {
    std::vector<int> samples;
    samples.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        int v = 0;
        try {
            v = reader.int_token("sample");
        } catch (const Error&) {
            raise(ErrorCode::truncated_payload, "ascii raster ended early");
        }
        samples.push_back(v);
    }
    return samples;
}

}  // namespace

AnyFrame parse_netpbm(std::span<const uint8_t> bytes) {
    ByteReader reader(bytes);
    if (bytes.size() < 2) raise(ErrorCode::malformed_header, "payload too short");
    const std::string magic = reader.token();
    if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
        raise(ErrorCode::unsupported_format, "unsupported magic '" + magic + "'");
    }
    const bool color = magic == "P3" || magic == "P6";
    const bool binary = magic == "P5" || magic == "P6";

    const int width = reader.int_token("width");
    const int height = reader.int_token("height");
    const int maxval = reader.int_token("maxval");
    if (width <= 0 || height <= 0) raise(ErrorCode::malformed_header, "non-positive dimensions");
    if (maxval <= 0) raise(ErrorCode::malformed_header, "non-positive maxval");
    if (maxval > 255) raise(ErrorCode::maxval_too_large, "maxval " + std::to_string(maxval) + " > 255");

    const size_t n_samples = static_cast<size_t>(width) * height * (color ? 3 : 1);
    std::vector<int> samples;
    if (binary) {
        reader.expect_raster_separator();
        const auto raster = reader.rest();
        if (raster.size() < n_samples) {
            raise(ErrorCode::truncated_payload,
                  "raster holds " + std::to_string(raster.size()) + " bytes, expected " +
                      std::to_string(n_samples));
        }
        samples.assign(raster.begin(), raster.begin() + n_samples);
    } else {
        samples = read_ascii_samples(reader, n_samples);
    }
    for (int v : samples) {
        if (v > maxval) raise(ErrorCode::malformed_header, "sample exceeds maxval");
    }

    if (color) {
        RgbFrame frame;
        frame.width = width;
        frame.height = height;
        frame.pixels.assign(samples.begin(), samples.end());
        return frame;
    }
    GrayFrame frame;
    frame.width = width;
    frame.height = height;
    frame.pixels.resize(n_samples);
    const double scale = 1.0 / maxval;
    for (size_t i = 0; i < n_samples; ++i) frame.pixels[i] = samples[i] * scale;
    return frame;
}

std::vector<uint8_t> encode_netpbm(const GrayFrame& frame) {
    char header[64];
    const int n = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", frame.width, frame.height);
    std::vector<uint8_t> out(header, header + n);
    out.reserve(out.size() + frame.pixels.size());
    for (double v : frame.pixels) {
        // round-half-up
        const double q = std::floor(v * 255.0 + 0.5);
        out.push_back(static_cast<uint8_t>(std::clamp(q, 0.0, 255.0)));
    }
    return out;
}

GrayFrame to_gray(const RgbFrame& frame) {
    GrayFrame out;
    out.width = frame.width;
    out.height = frame.height;
    out.pixels.resize(static_cast<size_t>(frame.width) * frame.height);
    for (size_t i = 0; i < out.pixels.size(); ++i) {
        const double r = frame.pixels[3 * i];
        const double g = frame.pixels[3 * i + 1];
        const double b = frame.pixels[3 * i + 2];
        out.pixels[i] = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
    }
    return out;
}

GrayFrame resize_bilinear(const GrayFrame& frame, int out_width, int out_height) {
    GrayFrame out;
    out.width = out_width;
    out.height = out_height;
    out.pixels.resize(static_cast<size_t>(out_width) * out_height);

    const int sw = frame.width;
    const int sh = frame.height;
    const double x_scale = static_cast<double>(sw) / out_width;
    const double y_scale = static_cast<double>(sh) / out_height;

    for (int y = 0; y < out_height; ++y) {
        double sy = (y + 0.5) * y_scale - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(sh - 1));
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, sh - 1);
        const double fy = sy - y0;
        for (int x = 0; x < out_width; ++x) {
            double sx = (x + 0.5) * x_scale - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(sw - 1));
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, sw - 1);
            const double fx = sx - x0;
            const double top = frame.at(x0, y0) * (1.0 - fx) + frame.at(x1, y0) * fx;
            const double bot = frame.at(x0, y1) * (1.0 - fx) + frame.at(x1, y1) * fx;
            out.at(x, y) = top * (1.0 - fy) + bot * fy;
        }
    }
    return out;
}

GrayFrame crop(const GrayFrame& frame, const CropRect& rect) {
    if (rect.left < 0 || rect.top < 0 || rect.width <= 0 || rect.height <= 0 ||
        rect.left + rect.width > frame.width || rect.top + rect.height > frame.height) {
        raise(ErrorCode::out_of_bounds, "crop rect exceeds frame bounds");
    }
    GrayFrame out;
    out.width = rect.width;
    out.height = rect.height;
    out.pixels.resize(static_cast<size_t>(rect.width) * rect.height);
    for (int y = 0; y < rect.height; ++y) {
        const auto* src = &frame.pixels[static_cast<size_t>(rect.top + y) * frame.width + rect.left];
        std::copy(src, src + rect.width, &out.pixels[static_cast<size_t>(y) * rect.width]);
    }
    return out;
}

}  // namespace scenestat
