#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scenestat/pixbuf.hpp"
#include "scenestat/reproject.hpp"
#include "scenestat/sequence.hpp"

namespace scenestat {

enum class ScriptKind {
    static_scene,  // repeated texture, sensor noise only
    flicker,       // multiplicative square-wave illumination, period 10 frames
    translate,     // exact per-frame texture shift with known homography
    mixed,         // flicker plus re-randomized local pixel blocks
};

struct SynthScript {
    ScriptKind kind = ScriptKind::static_scene;
    int n_frames = 2;
    int width = 320;
    int height = 240;
    uint64_t texture_seed = 0;
    double luminance_amplitude = 0.0;   // flicker/mixed, must stay in [0, 1)
    double motion_dx = 0.0;             // translate, pixels per frame
    double motion_dy = 0.0;
    double local_motion_fraction = 0.0;  // mixed, fraction of 8x8 blocks per frame
    double noise_sigma = 0.0;            // additive sensor noise, intensity units
};

// Per-adjacent-pair ground truth, computed from the emitted (quantized)
// frames so it matches what an analyzer measures on the files.
struct PairTruth {
    int pair_index = 0;
    double true_d_luminance = 0.0;
    Homography h;  // maps current-frame coordinates into the previous frame
    std::vector<int> changed_blocks;  // row-major 8x8 block ids (mixed only)
};

struct GroundTruthLog {
    std::vector<PairTruth> pairs;
};

// Renders the script into out_dir as P5 files frame_000000.pgm... and
// returns the ground-truth log. Bit-identical output for identical scripts.
GroundTruthLog generate(const SynthScript& script, const std::filesystem::path& out_dir);

// Raises InvalidScript when fields violate the script invariants.
void validate_script(const SynthScript& script);

std::string ground_truth_to_text(const GroundTruthLog& log);
GroundTruthLog parse_ground_truth_log(const std::string& text);

struct SequenceArtifacts {
    std::filesystem::path manifest_path;
    std::filesystem::path log_path;
    GroundTruthLog log;
};

// Frames + manifest (10 fps, skip 0) + ground-truth log under out_dir.
SequenceArtifacts write_sequence(const SynthScript& script, const std::string& name,
                                 const std::filesystem::path& out_dir);

// Built-in comparison corpora: "forestlike" (flicker 0.2, 15% block motion,
// noise 0.01) and "officelike" (0.2 px/frame drift, noise 0.01), both 100
// frames at 320x240.
SynthScript corpus_script(const std::string& preset, uint64_t seed);

SequenceArtifacts corpus(const std::string& preset, uint64_t seed,
                         const std::filesystem::path& out_dir);

}  // namespace scenestat
