#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "scenestat/pixbuf.hpp"

namespace scenestat {

struct Keypoint {
    double x = 0.0;  // level-0 (source frame) pixel coordinates
    double y = 0.0;
    int level = 0;           // pyramid level the corner was detected at
    double response = 0.0;   // Harris corner response
    double orientation = 0.0;  // radians in [0, 2*pi)
};

// 256-bit binary descriptor from rotated paired-pixel comparisons.
struct Descriptor {
    std::array<uint64_t, 4> bits{};

    int hamming(const Descriptor& other) const;
    void set_bit(int i) { bits[i >> 6] |= uint64_t{1} << (i & 63); }
    bool operator==(const Descriptor&) const = default;
};

struct FeatureSet {
    std::vector<Keypoint> keypoints;      // sorted by descending response
    std::vector<Descriptor> descriptors;  // parallel to keypoints

    size_t size() const { return keypoints.size(); }
};

struct MatchPair {
    int index_a = 0;
    int index_b = 0;
    int distance = 0;   // Hamming, 0..256
    double ratio = 0.0;  // best / second-best distance
};

// One comparison of the descriptor pattern: bit set when
// I(p + rot(ax, ay)) < I(p + rot(bx, by)).
struct PatternTest {
    int8_t ax, ay, bx, by;
};

using DescriptorPattern = std::array<PatternTest, 256>;

// The embedded v1 pattern. data/descriptor_pattern_v1.txt holds the same
// table; a test keeps file and embedding in sync.
const DescriptorPattern& descriptor_pattern_v1();

// Parses a pattern table file (rows of `ax ay bx by`, `#` comments).
DescriptorPattern load_descriptor_pattern(const std::filesystem::path& path);

struct FeatureConfig {
    int budget = 100;
    double fast_threshold = 0.08;  // in normalized intensity
    double ratio_threshold = 0.75;
};

// Multi-scale detection: 4-level pyramid (scale 1.2), FAST-9 corners ranked
// by Harris response with 3x3 non-max suppression, top `budget` kept overall,
// intensity-centroid orientation over a radius-15 patch, 256-bit descriptor
// from the v1 comparison pattern. Deterministic.
FeatureSet extract_features(const GrayFrame& frame, const FeatureConfig& config = {});

// Exhaustive one-directional (a -> b) Hamming matching; accept when
// best/second-best < ratio_threshold. No matches when |b| < 2.
std::vector<MatchPair> match_features(const FeatureSet& a, const FeatureSet& b,
                                      double ratio_threshold = 0.75);

// |match_features(extract(prev), extract(curr))|, in [0, budget].
int match_count_stat(const GrayFrame& prev, const GrayFrame& curr,
                     const FeatureConfig& config = {});

}  // namespace scenestat
