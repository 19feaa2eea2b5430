#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scenestat/pixbuf.hpp"

namespace scenestat {

// Declarative description of a sequence and its preprocessing. The on-disk
// form is a flat key-value document, one `key = value` per line with `#`
// comments.
struct DatasetManifest {
    std::string name;
    std::filesystem::path frames_dir;
    std::string frame_pattern = "*.pgm";  // glob, frames sorted lexicographically
    double native_fps = 0.0;
    double target_fps = 10.0;
    int skip_frames = 30;
    bool crop_bottom_half = false;
    std::optional<CropRect> crop;
    std::string notes;
};

struct SampledFrame {
    int index_in_source = 0;
    double timestamp = 0.0;  // index_in_source / native_fps
    GrayFrame frame;
};

enum class NormalizeMode {
    global,     // divide by 255 at parse time, nothing further
    per_frame,  // min-max stretch each frame to [0, 1]
};

// Parses a manifest document. Required keys: name, frames_dir, native_fps.
// Unknown keys are rejected.
DatasetManifest load_manifest(const std::string& text);

// Convenience: read and parse a manifest file; frames_dir is resolved
// relative to the manifest's directory.
DatasetManifest load_manifest_file(const std::filesystem::path& path);

// Source indices to sample: stride = round(native/target) clamped to >= 1,
// indices skip, skip+stride, ... < total_frames. Skipping applies to raw
// frames before striding.
std::vector<int> sample_indices(const DatasetManifest& manifest, int total_frames);

// Grayscale conversion (if RGB), optional per-frame normalization, then the
// manifest's crop. Idempotent on GrayFrame input with no crop.
GrayFrame preprocess_frame(const AnyFrame& raw, const DatasetManifest& manifest,
                           NormalizeMode mode = NormalizeMode::global);

// Files in frames_dir matching frame_pattern, sorted lexicographically by
// filename. The pattern supports `*` and `?`.
std::vector<std::filesystem::path> list_frame_files(const DatasetManifest& manifest);

// Serializes a manifest back to its key-value document form.
std::string manifest_to_text(const DatasetManifest& manifest);

}  // namespace scenestat
