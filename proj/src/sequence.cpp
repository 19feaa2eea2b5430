#include "scenestat/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace scenestat {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_fps(const std::string& value, const std::string& key) {
    double fps = 0.0;
    try {
        size_t consumed = 0;
        fps = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
        raise(ErrorCode::invalid_value, key + " is not a number: '" + value + "'");
    }
    if (!(fps > 0.0)) raise(ErrorCode::invalid_value, key + " must be positive");
    return fps;
}

CropRect parse_crop_rect(const std::string& value) {
    CropRect rect;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream in(value);
    if (!(in >> rect.left >> c1 >> rect.top >> c2 >> rect.width >> c3 >> rect.height) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
        raise(ErrorCode::invalid_value, "malformed crop '" + value + "', expected L,T,W,H");
    }
    std::string tail;
    if (in >> tail) raise(ErrorCode::invalid_value, "trailing data in crop '" + value + "'");
    if (rect.left < 0 || rect.top < 0 || rect.width <= 0 || rect.height <= 0) {
        raise(ErrorCode::invalid_value, "crop offsets must be >= 0 and extent > 0");
    }
    return rect;
}

// Matches `*` (any run) and `?` (any single char); everything else literal.
bool glob_match(const std::string& pattern, const std::string& name) {
    size_t p = 0, n = 0;
    size_t star = std::string::npos, star_n = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            star_n = n;
        } else if (star != std::string::npos) {
            p = star + 1;
            n = ++star_n;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

}  // namespace

DatasetManifest load_manifest(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            raise(ErrorCode::invalid_value,
                  "manifest line " + std::to_string(line_no) + " is not `key = value`");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            raise(ErrorCode::invalid_value, "empty key on manifest line " + std::to_string(line_no));
        }
        if (kv.count(key)) raise(ErrorCode::invalid_value, "duplicate key '" + key + "'");
        kv[key] = value;
    }

    for (const char* required : {"name", "frames_dir", "native_fps"}) {
        if (!kv.count(required)) {
            raise(ErrorCode::missing_key, std::string("manifest is missing '") + required + "'");
        }
    }

    DatasetManifest m;
    for (const auto& [key, value] : kv) {
        if (key == "name") {
            m.name = value;
        } else if (key == "frames_dir") {
            m.frames_dir = value;
        } else if (key == "frame_pattern") {
            m.frame_pattern = value;
        } else if (key == "native_fps") {
            m.native_fps = parse_fps(value, key);
        } else if (key == "target_fps") {
            m.target_fps = parse_fps(value, key);
        } else if (key == "skip_frames") {
            try {
                m.skip_frames = std::stoi(value);
            } catch (const std::exception&) {
                raise(ErrorCode::invalid_value, "skip_frames is not an integer");
            }
            if (m.skip_frames < 0) raise(ErrorCode::invalid_value, "skip_frames must be >= 0");
        } else if (key == "crop") {
            if (value == "bottom-half") {
                m.crop_bottom_half = true;
            } else {
                m.crop = parse_crop_rect(value);
            }
        } else if (key == "notes") {
            m.notes = value;
        } else {
            raise(ErrorCode::invalid_value, "unknown manifest key '" + key + "'");
        }
    }
    if (m.target_fps > m.native_fps) {
        raise(ErrorCode::invalid_value, "target_fps exceeds native_fps");
    }
    return m;
}

DatasetManifest load_manifest_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io_error, "cannot read manifest '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    DatasetManifest m = load_manifest(buf.str());
    if (m.frames_dir.is_relative()) {
        m.frames_dir = path.parent_path() / m.frames_dir;
    }
    return m;
}

std::vector<int> sample_indices(const DatasetManifest& manifest, int total_frames) {
    const long stride =
        std::max(1L, std::lround(manifest.native_fps / manifest.target_fps));
    std::vector<int> indices;
    for (long i = manifest.skip_frames; i < total_frames; i += stride) {
        indices.push_back(static_cast<int>(i));
    }
    return indices;
}

GrayFrame preprocess_frame(const AnyFrame& raw, const DatasetManifest& manifest,
                           NormalizeMode mode) {
    GrayFrame frame = std::holds_alternative<RgbFrame>(raw)
                          ? to_gray(std::get<RgbFrame>(raw))
                          : std::get<GrayFrame>(raw);
    if (mode == NormalizeMode::per_frame) {
        const auto [lo, hi] = std::minmax_element(frame.pixels.begin(), frame.pixels.end());
        const double range = *hi - *lo;
        for (double& v : frame.pixels) v = range > 0.0 ? (v - *lo) / range : 0.0;
    }
    if (manifest.crop_bottom_half) {
        const int top = frame.height / 2;
        frame = crop(frame, CropRect{0, top, frame.width, frame.height - top});
    } else if (manifest.crop) {
        frame = crop(frame, *manifest.crop);
    }
    return frame;
}

std::vector<std::filesystem::path> list_frame_files(const DatasetManifest& manifest) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(manifest.frames_dir, ec)) {
        raise(ErrorCode::io_error, "frames_dir '" + manifest.frames_dir.string() +
                                       "' is not a readable directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(manifest.frames_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (glob_match(manifest.frame_pattern, name)) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    return files;
}

std::string manifest_to_text(const DatasetManifest& manifest) {
    std::ostringstream out;
    out << "name = " << manifest.name << "\n";
    out << "frames_dir = " << manifest.frames_dir.string() << "\n";
    out << "frame_pattern = " << manifest.frame_pattern << "\n";
    out << "native_fps = " << manifest.native_fps << "\n";
    out << "target_fps = " << manifest.target_fps << "\n";
    out << "skip_frames = " << manifest.skip_frames << "\n";
    if (manifest.crop_bottom_half) {
        out << "crop = bottom-half\n";
    } else if (manifest.crop) {
        out << "crop = " << manifest.crop->left << "," << manifest.crop->top << ","
            << manifest.crop->width << "," << manifest.crop->height << "\n";
    }
    if (!manifest.notes.empty()) out << "notes = " << manifest.notes << "\n";
    return out.str();
}

}  // namespace scenestat
