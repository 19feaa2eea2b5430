#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "scenestat/features.hpp"
#include "scenestat/pixbuf.hpp"

namespace scenestat {

// Row-major 3x3 projective transform. Normalized so the bottom-right entry
// is 1 when it is nonzero, otherwise to Frobenius norm 1.
struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    std::pair<double, double> apply(double x, double y) const {
        const double w = m[6] * x + m[7] * y + m[8];
        return {(m[0] * x + m[1] * y + m[2]) / w, (m[3] * x + m[4] * y + m[5]) / w};
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
};

struct Correspondence {
    double x_a = 0.0, y_a = 0.0;
    double x_b = 0.0, y_b = 0.0;
};

struct RansacConfig {
    int iters = 1000;
    double inlier_threshold_px = 3.0;
    uint64_t seed = 0;
};

struct HomographyEstimate {
    Homography h;  // maps (x_a, y_a) -> (x_b, y_b)
    std::vector<uint8_t> inliers;  // flag per correspondence
};

// Seeded RANSAC over 4-point samples solved by normalized DLT; inliers by
// symmetric transfer error (forward and backward distances both under the
// threshold); best model refit on all its inliers. Deterministic given seed.
HomographyEstimate estimate_homography(const std::vector<Correspondence>& correspondences,
                                       const RansacConfig& config = {});

struct WarpResult {
    GrayFrame frame;
    std::vector<uint8_t> valid;  // per output pixel: source coordinate in bounds
};

// Inverse-maps every output pixel through h and samples the source
// bilinearly. h maps source coordinates into the output frame.
WarpResult warp_bilinear(const GrayFrame& frame, const Homography& h, int out_width,
                         int out_height);

// Matches curr against prev, estimates the curr->prev homography, warps curr
// into prev's frame, and returns the MSE over valid pixels. Missing when
// there are fewer than 4 matches, estimation fails, or the valid fraction is
// below 0.25.
std::optional<double> reprojected_mse(const GrayFrame& prev, const GrayFrame& curr,
                                      const FeatureConfig& features = {},
                                      const RansacConfig& ransac = {});

// Same computation with features already extracted for both frames.
std::optional<double> reprojected_mse(const GrayFrame& prev, const GrayFrame& curr,
                                      const FeatureSet& prev_features,
                                      const FeatureSet& curr_features, double ratio_threshold,
                                      const RansacConfig& ransac);

}  // namespace scenestat
