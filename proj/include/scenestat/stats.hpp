#pragma once

#include <array>
#include <optional>

#include "scenestat/pixbuf.hpp"

namespace scenestat {

struct Histogram256 {
    std::array<double, 256> bins{};
    bool normalized = false;

    bool operator==(const Histogram256&) const = default;
};

// Per-frame statistics. rms_contrast is missing for frames with near-zero
// mean intensity.
struct FrameStats {
    double luminance = 0.0;
    std::optional<double> rms_contrast;
    double laplacian_variance = 0.0;
};

// Per-adjacent-pair statistics. Missing reproj_mse encodes failed or
// degenerate reprojection, missing d_contrast a degenerate contrast on
// either side.
struct PairStats {
    double d_luminance = 0.0;
    std::optional<double> d_contrast;
    double kl_divergence = 0.0;
    int match_count = 0;
    std::optional<double> reproj_mse;
};

// Arithmetic mean of all intensities.
double luminance(const GrayFrame& frame);

// Population standard deviation divided by the mean; missing when the mean
// is below 1e-9.
std::optional<double> rms_contrast(const GrayFrame& frame);

// 256-bin normalized intensity histogram; bin index = min(floor(v*256), 255).
Histogram256 intensity_histogram(const GrayFrame& frame);

// D(p || q) = sum_u p(u) ln(p(u)/q(u)) after both histograms are smoothed by
// adding 1e-10 to every bin and renormalizing. Asymmetric; computed in the
// direction current || previous.
double kl_divergence(const Histogram256& p, const Histogram256& q);

// Population variance of the response of the 4-neighbor Laplacian kernel
// [[0,1,0],[1,-4,1],[0,1,0]] with reflect-101 borders. The caller is
// responsible for resizing to the reference 320x240 first.
double laplacian_variance(const GrayFrame& frame);

struct PairDeltas {
    double d_luminance = 0.0;
    std::optional<double> d_contrast;
};

// Absolute differences |L_t - L_{t-1}| and |C_t - C_{t-1}|.
PairDeltas pair_deltas(const FrameStats& prev, const FrameStats& curr);

}  // namespace scenestat
