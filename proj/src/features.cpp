#include "scenestat/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace scenestat {

namespace {

constexpr int kPyramidLevels = 4;
constexpr double kPyramidScale = 1.2;
constexpr int kOrientationRadius = 15;
// Keeps the radius-15 orientation patch and every rotated pattern offset
// (|offset| <= 13*sqrt(2) ~ 18.4, rounded to <= 18) inside the level image.
constexpr int kPatchMargin = 19;
constexpr double kHarrisK = 0.04;
constexpr int kHarrisBlock = 7;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr int kCircle[16][2] = {
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},  {3, 1},  {2, 2},  {1, 3},
    {0, 3},  {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};

struct PyramidLevel {
    GrayFrame image;
    GrayFrame smoothed;  // 5x5 box blur, sampled by the descriptor
    double scale_x = 1.0;  // level -> level-0 coordinate factors
    double scale_y = 1.0;
};

struct Candidate {
    int x = 0;
    int y = 0;
    int level = 0;
    double response = 0.0;
};

bool fast9_corner(const GrayFrame& img, int x, int y, double threshold) {
    const double center = img.at(x, y);
    const double hi = center + threshold;
    const double lo = center - threshold;
    // state per circle pixel: +1 brighter, -1 darker, 0 neither
    int state[16];
    int brighter = 0, darker = 0;
    for (int i = 0; i < 16; ++i) {
        const double v = img.at(x + kCircle[i][0], y + kCircle[i][1]);
        state[i] = v > hi ? 1 : (v < lo ? -1 : 0);
        brighter += state[i] == 1;
        darker += state[i] == -1;
    }
    if (brighter < 9 && darker < 9) return false;
    // longest circular run of a single state
    for (int want : {1, -1}) {
        int run = 0, best = 0;
        for (int i = 0; i < 32; ++i) {
            if (state[i & 15] == want) {
                if (++run >= 9) return true;
                best = std::max(best, run);
            } else {
                run = 0;
            }
        }
    }
    return false;
}

// Harris response over a kHarrisBlock window of Sobel gradient products.
double harris_response(const GrayFrame& img, int x, int y) {
    const int half = kHarrisBlock / 2;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            const int px = x + dx;
            const int py = y + dy;
            const double gx = (img.at(px + 1, py - 1) + 2.0 * img.at(px + 1, py) +
                               img.at(px + 1, py + 1)) -
                              (img.at(px - 1, py - 1) + 2.0 * img.at(px - 1, py) +
                               img.at(px - 1, py + 1));
            const double gy = (img.at(px - 1, py + 1) + 2.0 * img.at(px, py + 1) +
                               img.at(px + 1, py + 1)) -
                              (img.at(px - 1, py - 1) + 2.0 * img.at(px, py - 1) +
                               img.at(px + 1, py - 1));
            sxx += gx * gx;
            syy += gy * gy;
            sxy += gx * gy;
        }
    }
    const double det = sxx * syy - sxy * sxy;
    const double trace = sxx + syy;
    return det - kHarrisK * trace * trace;
}

GrayFrame box_blur5(const GrayFrame& img) {
    const int w = img.width;
    const int h = img.height;
    GrayFrame out = img;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sum = 0.0;
            int n = 0;
            for (int dy = -2; dy <= 2; ++dy) {
                const int py = y + dy;
                if (py < 0 || py >= h) continue;
                for (int dx = -2; dx <= 2; ++dx) {
                    const int px = x + dx;
                    if (px < 0 || px >= w) continue;
                    sum += img.at(px, py);
                    ++n;
                }
            }
            out.at(x, y) = sum / n;
        }
    }
    return out;
}

std::vector<PyramidLevel> build_pyramid(const GrayFrame& frame) {
    std::vector<PyramidLevel> pyramid(kPyramidLevels);
    for (int level = 0; level < kPyramidLevels; ++level) {
        PyramidLevel& pl = pyramid[level];
        if (level == 0) {
            pl.image = frame;
        } else {
            const double factor = std::pow(kPyramidScale, level);
            const int w = std::max(1, static_cast<int>(std::lround(frame.width / factor)));
            const int h = std::max(1, static_cast<int>(std::lround(frame.height / factor)));
            pl.image = resize_bilinear(frame, w, h);
        }
        pl.smoothed = box_blur5(pl.image);
        pl.scale_x = static_cast<double>(frame.width) / pl.image.width;
        pl.scale_y = static_cast<double>(frame.height) / pl.image.height;
    }
    return pyramid;
}

double intensity_centroid_angle(const GrayFrame& img, int cx, int cy) {
    double m10 = 0.0, m01 = 0.0;
    for (int dy = -kOrientationRadius; dy <= kOrientationRadius; ++dy) {
        const int span = static_cast<int>(
            std::sqrt(static_cast<double>(kOrientationRadius * kOrientationRadius - dy * dy)));
        for (int dx = -span; dx <= span; ++dx) {
            const double v = img.at(cx + dx, cy + dy);
            m10 += dx * v;
            m01 += dy * v;
        }
    }
    double angle = std::atan2(m01, m10);
    if (angle < 0.0) angle += kTwoPi;
    if (angle >= kTwoPi) angle = 0.0;
    return angle;
}

Descriptor compute_descriptor(const GrayFrame& smoothed, int cx, int cy, double angle) {
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    const DescriptorPattern& pattern = descriptor_pattern_v1();
    Descriptor d;
    for (int i = 0; i < 256; ++i) {
        const PatternTest& t = pattern[i];
        const int ax = cx + static_cast<int>(std::lround(ca * t.ax - sa * t.ay));
        const int ay = cy + static_cast<int>(std::lround(sa * t.ax + ca * t.ay));
        const int bx = cx + static_cast<int>(std::lround(ca * t.bx - sa * t.by));
        const int by = cy + static_cast<int>(std::lround(sa * t.bx + ca * t.by));
        if (smoothed.at(ax, ay) < smoothed.at(bx, by)) d.set_bit(i);
    }
    return d;
}

}  // namespace

int Descriptor::hamming(const Descriptor& other) const {
    int dist = 0;
    for (int i = 0; i < 4; ++i) dist += std::popcount(bits[i] ^ other.bits[i]);
    return dist;
}

FeatureSet extract_features(const GrayFrame& frame, const FeatureConfig& config) {
    if (frame.width < 32 || frame.height < 32) {
        raise(ErrorCode::frame_too_small, "feature extraction needs at least 32x32, got " +
                                              std::to_string(frame.width) + "x" +
                                              std::to_string(frame.height));
    }
    const auto pyramid = build_pyramid(frame);

    std::vector<Candidate> candidates;
    for (int level = 0; level < kPyramidLevels; ++level) {
        const GrayFrame& img = pyramid[level].image;
        const int w = img.width;
        const int h = img.height;
        if (w <= 2 * kPatchMargin || h <= 2 * kPatchMargin) continue;

        // FAST corners, scored by Harris
        std::vector<double> response(static_cast<size_t>(w) * h,
                                     -std::numeric_limits<double>::infinity());
        std::vector<Candidate> level_corners;
        for (int y = kPatchMargin; y < h - kPatchMargin; ++y) {
            for (int x = kPatchMargin; x < w - kPatchMargin; ++x) {
                if (!fast9_corner(img, x, y, config.fast_threshold)) continue;
                const double r = harris_response(img, x, y);
                response[static_cast<size_t>(y) * w + x] = r;
                level_corners.push_back(Candidate{x, y, level, r});
            }
        }
        // 3x3 non-max suppression on the Harris response; scan order breaks ties
        for (const Candidate& c : level_corners) {
            bool suppressed = false;
            for (int dy = -1; dy <= 1 && !suppressed; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const double other = response[static_cast<size_t>(c.y + dy) * w + c.x + dx];
                    if (other > c.response ||
                        (other == c.response && (dy < 0 || (dy == 0 && dx < 0)))) {
                        suppressed = true;
                        break;
                    }
                }
            }
            if (!suppressed) candidates.push_back(c);
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.level != b.level) return a.level < b.level;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (static_cast<int>(candidates.size()) > config.budget) {
        candidates.resize(config.budget);
    }

    FeatureSet set;
    set.keypoints.reserve(candidates.size());
    set.descriptors.reserve(candidates.size());
    for (const Candidate& c : candidates) {
        const PyramidLevel& pl = pyramid[c.level];
        const double angle = intensity_centroid_angle(pl.image, c.x, c.y);
        Keypoint kp;
        kp.x = c.x * pl.scale_x;
        kp.y = c.y * pl.scale_y;
        kp.level = c.level;
        kp.response = c.response;
        kp.orientation = angle;
        set.keypoints.push_back(kp);
        set.descriptors.push_back(compute_descriptor(pl.smoothed, c.x, c.y, angle));
    }
    return set;
}

std::vector<MatchPair> match_features(const FeatureSet& a, const FeatureSet& b,
                                      double ratio_threshold) {
    std::vector<MatchPair> matches;
    if (a.size() == 0 || b.size() < 2) return matches;
    for (size_t i = 0; i < a.size(); ++i) {
        int best = 257, second = 257, best_j = -1;
        for (size_t j = 0; j < b.size(); ++j) {
            const int d = a.descriptors[i].hamming(b.descriptors[j]);
            if (d < best) {
                second = best;
                best = d;
                best_j = static_cast<int>(j);
            } else if (d < second) {
                second = d;
            }
        }
        // second == 0 means an ambiguous duplicate in b; reject
        const double ratio = second > 0 ? static_cast<double>(best) / second : 1.0;
        if (ratio < ratio_threshold) {
            matches.push_back(MatchPair{static_cast<int>(i), best_j, best, ratio});
        }
    }
    return matches;
}

int match_count_stat(const GrayFrame& prev, const GrayFrame& curr, const FeatureConfig& config) {
    const FeatureSet a = extract_features(prev, config);
    const FeatureSet b = extract_features(curr, config);
    return static_cast<int>(match_features(a, b, config.ratio_threshold).size());
}

}  // namespace scenestat
