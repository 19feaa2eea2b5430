#include "scenestat/stats.hpp"

#include <cmath>

namespace scenestat {

namespace {

constexpr double kKlEpsilon = 1e-10;
constexpr double kMeanFloor = 1e-9;

// Mirror without edge repetition: -1 -> 1, n -> n-2.
int reflect101(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

}  // namespace

double luminance(const GrayFrame& frame) {
    double sum = 0.0;
    for (double v : frame.pixels) sum += v;
    return sum / static_cast<double>(frame.pixels.size());
}

std::optional<double> rms_contrast(const GrayFrame& frame) {
    const double mean = luminance(frame);
    if (mean < kMeanFloor) return std::nullopt;
    double sq = 0.0;
    for (double v : frame.pixels) {
        const double d = v - mean;
        sq += d * d;
    }
    const double stddev = std::sqrt(sq / static_cast<double>(frame.pixels.size()));
    return stddev / mean;
}

Histogram256 intensity_histogram(const GrayFrame& frame) {
    Histogram256 h;
    for (double v : frame.pixels) {
        int bin = static_cast<int>(v * 256.0);
        if (bin > 255) bin = 255;
        if (bin < 0) bin = 0;
        h.bins[bin] += 1.0;
    }
    const double inv_n = 1.0 / static_cast<double>(frame.pixels.size());
    for (double& b : h.bins) b *= inv_n;
    h.normalized = true;
    return h;
}

double kl_divergence(const Histogram256& p, const Histogram256& q) {
    if (!p.normalized || !q.normalized) {
        raise(ErrorCode::not_normalized, "kl_divergence requires normalized histograms");
    }
    // Additive smoothing keeps every bin positive, then renormalize.
    const double z = 1.0 + 256.0 * kKlEpsilon;
    double d = 0.0;
    for (size_t u = 0; u < 256; ++u) {
        const double pu = (p.bins[u] + kKlEpsilon) / z;
        const double qu = (q.bins[u] + kKlEpsilon) / z;
        d += pu * std::log(pu / qu);
    }
    return d;
}

double laplacian_variance(const GrayFrame& frame) {
    const int w = frame.width;
    const int h = frame.height;
    std::vector<double> response(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        const int yu = reflect101(y - 1, h);
        const int yd = reflect101(y + 1, h);
        for (int x = 0; x < w; ++x) {
            const int xl = reflect101(x - 1, w);
            const int xr = reflect101(x + 1, w);
            response[static_cast<size_t>(y) * w + x] =
                frame.at(x, yu) + frame.at(x, yd) + frame.at(xl, y) + frame.at(xr, y) -
                4.0 * frame.at(x, y);
        }
    }
    double mean = 0.0;
    for (double r : response) mean += r;
    mean /= static_cast<double>(response.size());
    double var = 0.0;
    for (double r : response) {
        const double d = r - mean;
        var += d * d;
    }
    return var / static_cast<double>(response.size());
}

PairDeltas pair_deltas(const FrameStats& prev, const FrameStats& curr) {
    PairDeltas deltas;
    deltas.d_luminance = std::abs(curr.luminance - prev.luminance);
    if (prev.rms_contrast && curr.rms_contrast) {
        deltas.d_contrast = std::abs(*curr.rms_contrast - *prev.rms_contrast);
    }
    return deltas;
}

}  // namespace scenestat
