#include "scenestat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "scenestat/stats.hpp"

namespace scenestat {

namespace {

constexpr int kOctaves = 4;
constexpr int kBaseLatticeSpacing = 16;
constexpr int kBlockSize = 8;
constexpr int kFlickerPeriod = 10;
// Texture range leaves headroom so the preset flicker amplitude never clamps.
constexpr double kTextureLow = 0.08;
constexpr double kTextureHigh = 0.83;

// Raw engine draws scaled by hand; std distributions are not pinned by the
// standard, mt19937_64 is.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

class GaussianDraw {
public:
    explicit GaussianDraw(std::mt19937_64& rng) : rng_(rng) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(rng_);
        while (u1 <= 0.0) u1 = uniform01(rng_);
        const double u2 = uniform01(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.141592653589793238462643 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64& rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Multi-octave value noise on progressively finer lattices, min-max
// stretched to [kTextureLow, kTextureHigh].
GrayFrame value_noise_texture(int width, int height, uint64_t seed) {
    GrayFrame tex;
    tex.width = width;
    tex.height = height;
    tex.pixels.assign(static_cast<size_t>(width) * height, 0.0);

    double amplitude = 1.0;
    for (int octave = 0; octave < kOctaves; ++octave) {
        const int spacing = kBaseLatticeSpacing >> octave;
        const int nx = (width - 1) / spacing + 2;
        const int ny = (height - 1) / spacing + 2;
        std::mt19937_64 rng(seed * 1000003ULL + static_cast<uint64_t>(octave));
        std::vector<double> lattice(static_cast<size_t>(nx) * ny);
        for (double& v : lattice) v = uniform01(rng);

        for (int y = 0; y < height; ++y) {
            const int gy = y / spacing;
            const double fy = smoothstep(static_cast<double>(y % spacing) / spacing);
            for (int x = 0; x < width; ++x) {
                const int gx = x / spacing;
                const double fx = smoothstep(static_cast<double>(x % spacing) / spacing);
                const double v00 = lattice[static_cast<size_t>(gy) * nx + gx];
                const double v10 = lattice[static_cast<size_t>(gy) * nx + gx + 1];
                const double v01 = lattice[static_cast<size_t>(gy + 1) * nx + gx];
                const double v11 = lattice[static_cast<size_t>(gy + 1) * nx + gx + 1];
                const double top = v00 * (1.0 - fx) + v10 * fx;
                const double bot = v01 * (1.0 - fx) + v11 * fx;
                tex.pixels[static_cast<size_t>(y) * width + x] +=
                    amplitude * (top * (1.0 - fy) + bot * fy);
            }
        }
        amplitude *= 0.5;
    }

    const auto [lo, hi] = std::minmax_element(tex.pixels.begin(), tex.pixels.end());
    const double range = *hi - *lo;
    for (double& v : tex.pixels) {
        const double unit = range > 0.0 ? (v - *lo) / range : 0.5;
        v = kTextureLow + unit * (kTextureHigh - kTextureLow);
    }
    return tex;
}

// Bilinear sample with clamping; offsets inside the texture by construction.
double sample_bilinear(const GrayFrame& tex, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(tex.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(tex.height - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, tex.width - 1);
    const int y1 = std::min(y0 + 1, tex.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = tex.at(x0, y0) * (1.0 - fx) + tex.at(x1, y0) * fx;
    const double bot = tex.at(x0, y1) * (1.0 - fx) + tex.at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

double square_wave(int frame) { return (frame % kFlickerPeriod) < kFlickerPeriod / 2 ? 1.0 : -1.0; }

// Quantizes exactly the way encode_netpbm + parse_netpbm round-trips, so
// logged truth matches what an analyzer reads back from the files.
GrayFrame quantized(const GrayFrame& frame) {
    GrayFrame out = frame;
    for (double& v : out.pixels) {
        v = std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0) / 255.0;
    }
    return out;
}

void write_frame(const GrayFrame& frame, const std::filesystem::path& dir, int index) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06d.pgm", index);
    const auto bytes = encode_netpbm(frame);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out.write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()))) {
        raise(ErrorCode::io_error, "cannot write frame file " + (dir / name).string());
    }
}

Homography translation_homography(double dx, double dy) {
    Homography h;
    h.m = {1, 0, dx, 0, 1, dy, 0, 0, 1};
    return h;
}

}  // namespace

void validate_script(const SynthScript& script) {
    if (script.n_frames < 2) raise(ErrorCode::invalid_script, "n_frames must be >= 2");
    if (script.width <= 0 || script.height <= 0) {
        raise(ErrorCode::invalid_script, "frame dimensions must be positive");
    }
    if (script.luminance_amplitude < 0.0 || script.luminance_amplitude >= 1.0) {
        raise(ErrorCode::invalid_script, "luminance_amplitude must lie in [0, 1)");
    }
    if (script.local_motion_fraction < 0.0 || script.local_motion_fraction > 1.0) {
        raise(ErrorCode::invalid_script, "local_motion_fraction must lie in [0, 1]");
    }
    if (script.noise_sigma < 0.0) raise(ErrorCode::invalid_script, "noise_sigma must be >= 0");
    if (!std::isfinite(script.motion_dx) || !std::isfinite(script.motion_dy)) {
        raise(ErrorCode::invalid_script, "motion must be finite");
    }
}

GroundTruthLog generate(const SynthScript& script, const std::filesystem::path& out_dir) {
    validate_script(script);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!std::filesystem::is_directory(out_dir)) {
        raise(ErrorCode::io_error, "cannot create output directory " + out_dir.string());
    }

    const int w = script.width;
    const int h = script.height;
    const bool translating = script.kind == ScriptKind::translate;

    // Texture padded to cover the whole motion range for translate scripts.
    const double span_x = translating ? script.motion_dx * (script.n_frames - 1) : 0.0;
    const double span_y = translating ? script.motion_dy * (script.n_frames - 1) : 0.0;
    const int pad_left = static_cast<int>(std::ceil(std::max(0.0, -span_x)));
    const int pad_top = static_cast<int>(std::ceil(std::max(0.0, -span_y)));
    const int tex_w = w + pad_left + static_cast<int>(std::ceil(std::max(0.0, span_x))) + 1;
    const int tex_h = h + pad_top + static_cast<int>(std::ceil(std::max(0.0, span_y))) + 1;

    GrayFrame scene = value_noise_texture(tex_w, tex_h, script.texture_seed);
    std::mt19937_64 rng(script.texture_seed ^ 0x9e3779b97f4a7c15ULL);
    GaussianDraw gauss(rng);

    const int blocks_x = (w + kBlockSize - 1) / kBlockSize;
    const int blocks_y = (h + kBlockSize - 1) / kBlockSize;
    const int n_blocks = blocks_x * blocks_y;
    const int blocks_per_frame = static_cast<int>(
        std::lround(script.local_motion_fraction * n_blocks));

    GroundTruthLog log;
    GrayFrame prev_emitted;
    for (int t = 0; t < script.n_frames; ++t) {
        std::vector<int> changed_blocks;
        if (script.kind == ScriptKind::mixed && t > 0 && blocks_per_frame > 0) {
            // re-randomize a deterministic choice of blocks from fresh noise
            const GrayFrame fresh = value_noise_texture(
                w, h, script.texture_seed * 0x100000001b3ULL + static_cast<uint64_t>(t));
            std::vector<int> ids(n_blocks);
            for (int i = 0; i < n_blocks; ++i) ids[i] = i;
            for (int i = n_blocks - 1; i > 0; --i) {
                const int j = static_cast<int>(rng() % static_cast<uint64_t>(i + 1));
                std::swap(ids[i], ids[j]);
            }
            ids.resize(blocks_per_frame);
            std::sort(ids.begin(), ids.end());
            for (int id : ids) {
                const int bx = (id % blocks_x) * kBlockSize;
                const int by = (id / blocks_x) * kBlockSize;
                for (int y = by; y < std::min(by + kBlockSize, h); ++y) {
                    for (int x = bx; x < std::min(bx + kBlockSize, w); ++x) {
                        scene.at(x, y) = fresh.at(x, y);
                    }
                }
            }
            changed_blocks = std::move(ids);
        }

        GrayFrame frame;
        frame.width = w;
        frame.height = h;
        frame.pixels.resize(static_cast<size_t>(w) * h);
        const double gain = (script.kind == ScriptKind::flicker || script.kind == ScriptKind::mixed)
                                ? 1.0 + script.luminance_amplitude * square_wave(t)
                                : 1.0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double v;
                if (translating) {
                    v = sample_bilinear(scene, pad_left + x + t * script.motion_dx,
                                        pad_top + y + t * script.motion_dy);
                } else {
                    v = scene.at(x, y);
                }
                frame.at(x, y) = std::clamp(v * gain, 0.0, 1.0);
            }
        }
        if (script.noise_sigma > 0.0) {
            for (double& v : frame.pixels) {
                v = std::clamp(v + gauss.next() * script.noise_sigma, 0.0, 1.0);
            }
        }

        const GrayFrame emitted = quantized(frame);
        write_frame(emitted, out_dir, t);

        if (t > 0) {
            PairTruth truth;
            truth.pair_index = t;
            truth.true_d_luminance = std::abs(luminance(emitted) - luminance(prev_emitted));
            truth.h = translating
                          ? translation_homography(script.motion_dx, script.motion_dy)
                          : Homography{};
            truth.changed_blocks = std::move(changed_blocks);
            log.pairs.push_back(std::move(truth));
        }
        prev_emitted = emitted;
    }
    return log;
}

std::string ground_truth_to_text(const GroundTruthLog& log) {
    std::ostringstream out;
    out << "pair_index,true_d_luminance,h00,h01,h02,h10,h11,h12,h20,h21,h22,changed_blocks\n";
    char buf[32];
    for (const PairTruth& p : log.pairs) {
        out << p.pair_index;
        std::snprintf(buf, sizeof(buf), "%.17g", p.true_d_luminance);
        out << ',' << buf;
        for (double v : p.h.m) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << ',';
        for (size_t i = 0; i < p.changed_blocks.size(); ++i) {
            if (i) out << ';';
            out << p.changed_blocks[i];
        }
        out << '\n';
    }
    return out.str();
}

GroundTruthLog parse_ground_truth_log(const std::string& text) {
    GroundTruthLog log;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream fs(line);
        while (std::getline(fs, field, ',')) fields.push_back(field);
        if (fields.size() < 11) raise(ErrorCode::invalid_value, "short ground-truth row");
        PairTruth p;
        p.pair_index = std::stoi(fields[0]);
        p.true_d_luminance = std::stod(fields[1]);
        for (int i = 0; i < 9; ++i) p.h.m[i] = std::stod(fields[2 + i]);
        if (fields.size() >= 12 && !fields[11].empty()) {
            std::istringstream bs(fields[11]);
            std::string id;
            while (std::getline(bs, id, ';')) p.changed_blocks.push_back(std::stoi(id));
        }
        log.pairs.push_back(std::move(p));
    }
    return log;
}

SequenceArtifacts write_sequence(const SynthScript& script, const std::string& name,
                                 const std::filesystem::path& out_dir) {
    SequenceArtifacts artifacts;
    artifacts.log = generate(script, out_dir);

    DatasetManifest manifest;
    manifest.name = name;
    manifest.frames_dir = ".";
    manifest.frame_pattern = "frame_*.pgm";
    manifest.native_fps = 10.0;
    manifest.target_fps = 10.0;
    manifest.skip_frames = 0;

    artifacts.manifest_path = out_dir / (name + ".manifest");
    std::ofstream mf(artifacts.manifest_path, std::ios::binary);
    mf << manifest_to_text(manifest);
    if (!mf) raise(ErrorCode::io_error, "cannot write " + artifacts.manifest_path.string());

    artifacts.log_path = out_dir / (name + "_truth.csv");
    std::ofstream lf(artifacts.log_path, std::ios::binary);
    lf << ground_truth_to_text(artifacts.log);
    if (!lf) raise(ErrorCode::io_error, "cannot write " + artifacts.log_path.string());
    return artifacts;
}

SynthScript corpus_script(const std::string& preset, uint64_t seed) {
    SynthScript script;
    script.n_frames = 100;
    script.width = 320;
    script.height = 240;
    script.texture_seed = seed;
    script.noise_sigma = 0.01;
    if (preset == "forestlike") {
        script.kind = ScriptKind::mixed;
        script.luminance_amplitude = 0.2;
        script.local_motion_fraction = 0.15;
    } else if (preset == "officelike") {
        script.kind = ScriptKind::translate;
        script.motion_dx = 0.2;
        script.motion_dy = 0.0;
    } else {
        raise(ErrorCode::invalid_script, "unknown preset '" + preset + "'");
    }
    return script;
}

SequenceArtifacts corpus(const std::string& preset, uint64_t seed,
                         const std::filesystem::path& out_dir) {
    return write_sequence(corpus_script(preset, seed), preset, out_dir);
}

}  // namespace scenestat
