#include "doctest.h"

#include <random>
#include <string>

#include "scenestat/pixbuf.hpp"

using namespace scenestat;

namespace {

std::vector<uint8_t> bytes_of(const std::string& header, std::initializer_list<int> raster) {
    std::vector<uint8_t> out(header.begin(), header.end());
    for (int v : raster) out.push_back(static_cast<uint8_t>(v));
    return out;
}

GrayFrame make_gray(int w, int h, std::vector<double> px) {
    GrayFrame f;
    f.width = w;
    f.height = h;
    f.pixels = std::move(px);
    return f;
}

}  // namespace

TEST_CASE("parse P5 binary grayscale") {
    const auto payload = bytes_of("P5 2 2 255 ", {0, 255, 0, 255});
    const auto frame = std::get<GrayFrame>(parse_netpbm(payload));
    CHECK(frame.width == 2);
    CHECK(frame.height == 2);
    CHECK(frame.pixels == std::vector<double>{0.0, 1.0, 0.0, 1.0});
}

TEST_CASE("parse P6 binary color") {
    const auto payload = bytes_of("P6 1 1 255 ", {255, 0, 0});
    const auto frame = std::get<RgbFrame>(parse_netpbm(payload));
    CHECK(frame.width == 1);
    CHECK(frame.height == 1);
    CHECK(frame.pixels == std::vector<uint8_t>{255, 0, 0});
}

TEST_CASE("parse ascii variants and comments") {
    const std::string p2 = "P2\n# a comment\n2 1\n# another\n100\n0 100\n";
    const auto gray = std::get<GrayFrame>(parse_netpbm(
        std::vector<uint8_t>(p2.begin(), p2.end())));
    CHECK(gray.pixels[0] == doctest::Approx(0.0));
    CHECK(gray.pixels[1] == doctest::Approx(1.0));

    const std::string p3 = "P3 1 1 255 12 34 56";
    const auto rgb = std::get<RgbFrame>(parse_netpbm(std::vector<uint8_t>(p3.begin(), p3.end())));
    CHECK(rgb.pixels == std::vector<uint8_t>{12, 34, 56});
}

TEST_CASE("parse error cases") {
    auto code_of = [](const std::vector<uint8_t>& payload) {
        try {
            parse_netpbm(payload);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::io_error;  // not reached
    };
    CHECK(code_of(bytes_of("P9 2 2 255 ", {0, 0, 0, 0})) == ErrorCode::unsupported_format);
    CHECK(code_of(bytes_of("P5 2 2 999 ", {0, 0, 0, 0})) == ErrorCode::maxval_too_large);
    CHECK(code_of(bytes_of("P5 2 2 255 ", {0, 0})) == ErrorCode::truncated_payload);
    CHECK(code_of(bytes_of("P5 two 2 255 ", {0, 0, 0, 0})) == ErrorCode::malformed_header);
    const std::string p2_short = "P2 2 2 255 7 7 7";
    CHECK(code_of(std::vector<uint8_t>(p2_short.begin(), p2_short.end())) ==
          ErrorCode::truncated_payload);
}

TEST_CASE("parse scales by maxval") {
    const auto payload = bytes_of("P5 1 1 100 ", {50});
    const auto frame = std::get<GrayFrame>(parse_netpbm(payload));
    CHECK(frame.pixels[0] == doctest::Approx(0.5));
}

TEST_CASE("encode quantizes round-half-up") {
    const auto full = encode_netpbm(make_gray(1, 1, {1.0}));
    const std::string expected_header = "P5\n1 1\n255\n";
    CHECK(std::string(full.begin(), full.end() - 1) == expected_header);
    CHECK(full.back() == 255);

    CHECK(encode_netpbm(make_gray(1, 1, {0.0})).back() == 0);

    const auto two = encode_netpbm(make_gray(2, 1, {0.5, 0.25}));
    // round(0.5*255) = 128, round(0.25*255) = 64 under half-up rounding
    CHECK(two[two.size() - 2] == 128);
    CHECK(two[two.size() - 1] == 64);
}

TEST_CASE("parse-encode-parse reproduces the P5 payload bytes") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 17);
        const int h = 1 + static_cast<int>(rng() % 13);
        std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
        std::vector<uint8_t> payload(header.begin(), header.end());
        for (int i = 0; i < w * h; ++i) payload.push_back(static_cast<uint8_t>(rng() % 256));

        const auto frame = std::get<GrayFrame>(parse_netpbm(payload));
        const auto encoded = encode_netpbm(frame);
        const auto reparsed = std::get<GrayFrame>(parse_netpbm(encoded));
        CHECK(reparsed.pixels == frame.pixels);
        // raster bytes identical to the original
        CHECK(std::equal(encoded.end() - w * h, encoded.end(), payload.end() - w * h));
    }
}

TEST_CASE("to_gray uses BT.601 weights") {
    RgbFrame rgb;
    rgb.width = 3;
    rgb.height = 1;
    rgb.pixels = {255, 255, 255, 0, 0, 0, 255, 0, 0};
    const auto gray = to_gray(rgb);
    CHECK(gray.pixels[0] == doctest::Approx(1.0));
    CHECK(gray.pixels[1] == doctest::Approx(0.0));
    CHECK(gray.pixels[2] == doctest::Approx(0.299));
}

TEST_CASE("to_gray in range and flip-invariant") {
    std::mt19937_64 rng(11);
    RgbFrame rgb;
    rgb.width = 9;
    rgb.height = 5;
    rgb.pixels.resize(9 * 5 * 3);
    for (auto& c : rgb.pixels) c = static_cast<uint8_t>(rng() % 256);

    const auto gray = to_gray(rgb);
    for (double v : gray.pixels) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    RgbFrame flipped = rgb;
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                flipped.pixels[(y * rgb.width + x) * 3 + c] =
                    rgb.pixels[(y * rgb.width + (rgb.width - 1 - x)) * 3 + c];
            }
        }
    }
    const auto gray_flipped = to_gray(flipped);
    for (int y = 0; y < gray.height; ++y) {
        for (int x = 0; x < gray.width; ++x) {
            CHECK(gray.at(x, y) == gray_flipped.at(gray.width - 1 - x, y));
        }
    }
}

TEST_CASE("resize identity is bit-identical") {
    std::mt19937_64 rng(3);
    GrayFrame f = make_gray(13, 7, {});
    f.pixels.resize(13 * 7);
    for (auto& v : f.pixels) v = static_cast<double>(rng() % 1000) / 999.0;
    const auto same = resize_bilinear(f, 13, 7);
    CHECK(same.pixels == f.pixels);
}

TEST_CASE("resize of constant frame stays constant") {
    const auto c = make_gray(5, 4, std::vector<double>(20, 0.37));
    const auto out = resize_bilinear(c, 11, 3);
    for (double v : out.pixels) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("resize 2x1 to 4x1 matches hand-computed centers") {
    const auto f = make_gray(2, 1, {0.0, 1.0});
    const auto out = resize_bilinear(f, 4, 1);
    // source x = (x+0.5)/2 - 0.5 clamped: -0.25->0, 0.25, 0.75, 1.25->1
    CHECK(out.pixels[0] == doctest::Approx(0.0));
    CHECK(out.pixels[1] == doctest::Approx(0.25));
    CHECK(out.pixels[2] == doctest::Approx(0.75));
    CHECK(out.pixels[3] == doctest::Approx(1.0));
}

TEST_CASE("resize output bounded by input range") {
    std::mt19937_64 rng(5);
    GrayFrame f = make_gray(17, 9, {});
    f.pixels.resize(17 * 9);
    for (auto& v : f.pixels) v = 0.2 + 0.6 * static_cast<double>(rng() % 1000) / 999.0;
    const auto [lo, hi] = std::minmax_element(f.pixels.begin(), f.pixels.end());
    for (auto [w, h] : {std::pair{40, 21}, {5, 3}, {17, 30}}) {
        const auto out = resize_bilinear(f, w, h);
        for (double v : out.pixels) {
            CHECK(v >= *lo - 1e-12);
            CHECK(v <= *hi + 1e-12);
        }
    }
}

TEST_CASE("crop full frame and bottom half") {
    GrayFrame f = make_gray(320, 240, {});
    f.pixels.resize(320 * 240);
    for (size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = static_cast<double>(i % 255) / 255.0;

    const auto whole = crop(f, CropRect{0, 0, 320, 240});
    CHECK(whole.pixels == f.pixels);

    const auto bottom = crop(f, CropRect{0, 120, 320, 120});
    CHECK(bottom.width == 320);
    CHECK(bottom.height == 120);
    CHECK(bottom.at(0, 0) == f.at(0, 120));
    CHECK(bottom.at(319, 119) == f.at(319, 239));

    CHECK_THROWS_AS(crop(f, CropRect{0, 0, 321, 240}), Error);
}

TEST_CASE("crop composition equals composed rect") {
    GrayFrame f = make_gray(30, 20, {});
    f.pixels.resize(600);
    std::mt19937_64 rng(9);
    for (auto& v : f.pixels) v = static_cast<double>(rng() % 256) / 255.0;

    const CropRect a{4, 3, 20, 12};
    const CropRect b{5, 2, 10, 8};
    const auto nested = crop(crop(f, a), b);
    const auto composed = crop(f, CropRect{a.left + b.left, a.top + b.top, b.width, b.height});
    CHECK(nested.pixels == composed.pixels);
}
