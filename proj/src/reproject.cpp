#include "scenestat/reproject.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace scenestat {

namespace {

constexpr double kDetFloor = 1e-12;
constexpr double kMinValidFraction = 0.25;

struct NormalizeTransform {
    double scale = 1.0;
    double cx = 0.0;
    double cy = 0.0;
};

// Hartley normalization: centroid to origin, mean distance to sqrt(2).
std::optional<NormalizeTransform> normalizer(const std::vector<Correspondence>& pts, bool side_a) {
    NormalizeTransform t;
    for (const auto& c : pts) {
        t.cx += side_a ? c.x_a : c.x_b;
        t.cy += side_a ? c.y_a : c.y_b;
    }
    t.cx /= pts.size();
    t.cy /= pts.size();
    double mean_dist = 0.0;
    for (const auto& c : pts) {
        const double dx = (side_a ? c.x_a : c.x_b) - t.cx;
        const double dy = (side_a ? c.y_a : c.y_b) - t.cy;
        mean_dist += std::sqrt(dx * dx + dy * dy);
    }
    mean_dist /= pts.size();
    if (mean_dist < 1e-12) return std::nullopt;  // coincident points
    t.scale = std::sqrt(2.0) / mean_dist;
    return t;
}

// Direct linear transform on normalized coordinates; null vector by SVD.
std::optional<Homography> solve_dlt(const std::vector<Correspondence>& pts) {
    const auto ta = normalizer(pts, true);
    const auto tb = normalizer(pts, false);
    if (!ta || !tb) return std::nullopt;

    Eigen::MatrixXd a(2 * pts.size(), 9);
    for (size_t i = 0; i < pts.size(); ++i) {
        const double x = (pts[i].x_a - ta->cx) * ta->scale;
        const double y = (pts[i].y_a - ta->cy) * ta->scale;
        const double u = (pts[i].x_b - tb->cx) * tb->scale;
        const double v = (pts[i].y_b - tb->cy) * tb->scale;
        a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd h = svd.matrixV().col(8);

    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    // denormalize: H = Tb^-1 * Hn * Ta
    Eigen::Matrix3d mat_ta, inv_tb;
    mat_ta << ta->scale, 0, -ta->scale * ta->cx, 0, ta->scale, -ta->scale * ta->cy, 0, 0, 1;
    inv_tb << 1.0 / tb->scale, 0, tb->cx, 0, 1.0 / tb->scale, tb->cy, 0, 0, 1;
    Eigen::Matrix3d full = inv_tb * hn * mat_ta;

    Homography result;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) result.m[r * 3 + c] = full(r, c);
    if (!std::all_of(result.m.begin(), result.m.end(),
                     [](double v) { return std::isfinite(v); })) {
        return std::nullopt;
    }
    if (std::abs(result.det()) < kDetFloor) return std::nullopt;

    if (std::abs(result.m[8]) > kDetFloor) {
        const double inv = 1.0 / result.m[8];
        for (double& v : result.m) v *= inv;
    } else {
        double norm = 0.0;
        for (double v : result.m) norm += v * v;
        const double inv = 1.0 / std::sqrt(norm);
        for (double& v : result.m) v *= inv;
    }
    return result;
}

std::optional<Homography> invert(const Homography& h) {
    const double d = h.det();
    if (std::abs(d) < kDetFloor) return std::nullopt;
    const auto& m = h.m;
    Homography inv;
    inv.m = {(m[4] * m[8] - m[5] * m[7]) / d, (m[2] * m[7] - m[1] * m[8]) / d,
             (m[1] * m[5] - m[2] * m[4]) / d, (m[5] * m[6] - m[3] * m[8]) / d,
             (m[0] * m[8] - m[2] * m[6]) / d, (m[2] * m[3] - m[0] * m[5]) / d,
             (m[3] * m[7] - m[4] * m[6]) / d, (m[1] * m[6] - m[0] * m[7]) / d,
             (m[0] * m[4] - m[1] * m[3]) / d};
    return inv;
}

bool is_inlier(const Homography& h, const Homography& h_inv, const Correspondence& c,
               double threshold) {
    const auto [fx, fy] = h.apply(c.x_a, c.y_a);
    const double fwd = std::hypot(fx - c.x_b, fy - c.y_b);
    if (fwd >= threshold) return false;
    const auto [bx, by] = h_inv.apply(c.x_b, c.y_b);
    const double bwd = std::hypot(bx - c.x_a, by - c.y_a);
    return bwd < threshold;
}

}  // namespace

HomographyEstimate estimate_homography(const std::vector<Correspondence>& correspondences,
                                       const RansacConfig& config) {
    const size_t n = correspondences.size();
    if (n < 4) {
        raise(ErrorCode::insufficient_matches,
              "homography needs >= 4 correspondences, got " + std::to_string(n));
    }

    std::mt19937_64 rng(config.seed);
    std::vector<Correspondence> sample(4);
    std::optional<Homography> best;
    size_t best_count = 0;
    double best_err = std::numeric_limits<double>::infinity();
    std::vector<uint8_t> best_flags;

    for (int iter = 0; iter < config.iters; ++iter) {
        size_t idx[4];
        for (int k = 0; k < 4; ++k) {
            size_t pick;
            bool fresh;
            do {
                pick = rng() % n;
                fresh = true;
                for (int j = 0; j < k; ++j) fresh &= idx[j] != pick;
            } while (!fresh);
            idx[k] = pick;
            sample[k] = correspondences[pick];
        }

        const auto model = solve_dlt(sample);
        if (!model) continue;
        const auto model_inv = invert(*model);
        if (!model_inv) continue;

        std::vector<uint8_t> flags(n, 0);
        size_t count = 0;
        double err = 0.0;
        for (size_t i = 0; i < n; ++i) {
            if (is_inlier(*model, *model_inv, correspondences[i], config.inlier_threshold_px)) {
                flags[i] = 1;
                ++count;
                const auto [fx, fy] = model->apply(correspondences[i].x_a, correspondences[i].y_a);
                err += std::hypot(fx - correspondences[i].x_b, fy - correspondences[i].y_b);
            }
        }
        if (count > best_count || (count == best_count && err < best_err)) {
            best = model;
            best_count = count;
            best_err = err;
            best_flags = std::move(flags);
        }
    }

    if (!best || best_count < 4) {
        raise(ErrorCode::degenerate_configuration,
              "no non-degenerate homography found after " + std::to_string(config.iters) +
                  " iterations");
    }

    // refit on all inliers of the best model
    std::vector<Correspondence> inlier_pts;
    inlier_pts.reserve(best_count);
    for (size_t i = 0; i < n; ++i) {
        if (best_flags[i]) inlier_pts.push_back(correspondences[i]);
    }
    if (const auto refit = solve_dlt(inlier_pts)) {
        if (const auto refit_inv = invert(*refit)) {
            best = refit;
            for (size_t i = 0; i < n; ++i) {
                best_flags[i] = is_inlier(*refit, *refit_inv, correspondences[i],
                                          config.inlier_threshold_px);
            }
        }
    }

    HomographyEstimate result;
    result.h = *best;
    result.inliers = std::move(best_flags);
    return result;
}

WarpResult warp_bilinear(const GrayFrame& frame, const Homography& h, int out_width,
                         int out_height) {
    const auto inv = invert(h);
    if (!inv) raise(ErrorCode::non_invertible, "homography is not invertible");

    WarpResult out;
    out.frame.width = out_width;
    out.frame.height = out_height;
    out.frame.pixels.assign(static_cast<size_t>(out_width) * out_height, 0.0);
    out.valid.assign(static_cast<size_t>(out_width) * out_height, 0);

    const int sw = frame.width;
    const int sh = frame.height;
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            const double w = inv->m[6] * x + inv->m[7] * y + inv->m[8];
            if (std::abs(w) < kDetFloor) continue;
            const double sx = (inv->m[0] * x + inv->m[1] * y + inv->m[2]) / w;
            const double sy = (inv->m[3] * x + inv->m[4] * y + inv->m[5]) / w;
            if (sx < 0.0 || sx > sw - 1 || sy < 0.0 || sy > sh - 1) continue;
            const int x0 = static_cast<int>(sx);
            const int y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, sw - 1);
            const int y1 = std::min(y0 + 1, sh - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;
            const double top = frame.at(x0, y0) * (1.0 - fx) + frame.at(x1, y0) * fx;
            const double bot = frame.at(x0, y1) * (1.0 - fx) + frame.at(x1, y1) * fx;
            const size_t i = static_cast<size_t>(y) * out_width + x;
            out.frame.pixels[i] = top * (1.0 - fy) + bot * fy;
            out.valid[i] = 1;
        }
    }
    return out;
}

std::optional<double> reprojected_mse(const GrayFrame& prev, const GrayFrame& curr,
                                      const FeatureConfig& features,
                                      const RansacConfig& ransac) {
    return reprojected_mse(prev, curr, extract_features(prev, features),
                           extract_features(curr, features), features.ratio_threshold, ransac);
}

std::optional<double> reprojected_mse(const GrayFrame& prev, const GrayFrame& curr,
                                      const FeatureSet& prev_features,
                                      const FeatureSet& curr_features, double ratio_threshold,
                                      const RansacConfig& ransac) {
    const auto matches = match_features(curr_features, prev_features, ratio_threshold);
    if (matches.size() < 4) return std::nullopt;

    std::vector<Correspondence> correspondences;
    correspondences.reserve(matches.size());
    for (const MatchPair& m : matches) {
        const Keypoint& a = curr_features.keypoints[m.index_a];
        const Keypoint& b = prev_features.keypoints[m.index_b];
        correspondences.push_back(Correspondence{a.x, a.y, b.x, b.y});
    }

    HomographyEstimate estimate;
    try {
        estimate = estimate_homography(correspondences, ransac);
    } catch (const Error&) {
        return std::nullopt;
    }

    const WarpResult warped = warp_bilinear(curr, estimate.h, prev.width, prev.height);
    size_t n_valid = 0;
    double sum_sq = 0.0;
    for (size_t i = 0; i < warped.valid.size(); ++i) {
        if (!warped.valid[i]) continue;
        ++n_valid;
        const double d = warped.frame.pixels[i] - prev.pixels[i];
        sum_sq += d * d;
    }
    if (n_valid < kMinValidFraction * warped.valid.size()) return std::nullopt;
    return sum_sq / static_cast<double>(n_valid);
}

}  // namespace scenestat
