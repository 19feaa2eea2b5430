#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "scenestat/report.hpp"
#include "scenestat/synth.hpp"

namespace {

using namespace scenestat;

// exit codes: 0 success, 1 usage, 2 data error, 3 internal
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

void write_file_or_stdout(const std::string& content, const std::string& path) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) raise(ErrorCode::io_error, "cannot write '" + path + "'");
}

struct AnalyzeArgs {
    std::string manifest_path;
    std::string output = "-";
    RunConfig config;
    std::string normalize = "global";
    std::string crop;
    std::optional<double> target_fps;
    std::optional<int> skip_frames;
};

int run_analyze(const AnalyzeArgs& args) {
    if (!std::filesystem::exists(args.manifest_path)) {
        raise(ErrorCode::io_error, "manifest not found: '" + args.manifest_path + "'");
    }
    DatasetManifest manifest = load_manifest_file(args.manifest_path);
    if (args.target_fps) manifest.target_fps = *args.target_fps;
    if (args.skip_frames) manifest.skip_frames = *args.skip_frames;
    if (!args.crop.empty()) {
        // route through the manifest parser so the syntax stays identical
        const DatasetManifest parsed = load_manifest(
            "name = x\nframes_dir = x\nnative_fps = 10\ncrop = " + args.crop + "\n");
        manifest.crop_bottom_half = parsed.crop_bottom_half;
        manifest.crop = parsed.crop;
    }

    RunConfig config = args.config;
    config.normalize =
        args.normalize == "per-frame" ? NormalizeMode::per_frame : NormalizeMode::global;

    std::cerr << "analyzing '" << manifest.name << "' from " << manifest.frames_dir.string()
              << "\n";
    const auto records = analyze_sequence(manifest, config);
    write_file_or_stdout(records_to_csv(records), args.output);
    std::cerr << records.size() << " records (" << records.size() - 1 << " pairs) written to "
              << args.output << "\n";
    return 0;
}

struct SynthArgs {
    std::string kind;
    std::string out_dir;
    uint64_t seed = 0;
    int n_frames = 100;
    int width = 320;
    int height = 240;
    double amplitude = 0.2;
    double dx = 0.0;
    double dy = 0.0;
    double motion_fraction = 0.15;
    double noise_sigma = 0.0;
};

int run_synth(const SynthArgs& args) {
    SequenceArtifacts artifacts;
    if (args.kind == "forestlike" || args.kind == "officelike") {
        artifacts = corpus(args.kind, args.seed, args.out_dir);
    } else {
        SynthScript script;
        script.n_frames = args.n_frames;
        script.width = args.width;
        script.height = args.height;
        script.texture_seed = args.seed;
        script.noise_sigma = args.noise_sigma;
        if (args.kind == "static") {
            script.kind = ScriptKind::static_scene;
        } else if (args.kind == "flicker") {
            script.kind = ScriptKind::flicker;
            script.luminance_amplitude = args.amplitude;
        } else if (args.kind == "translate") {
            script.kind = ScriptKind::translate;
            script.motion_dx = args.dx;
            script.motion_dy = args.dy;
        } else if (args.kind == "mixed") {
            script.kind = ScriptKind::mixed;
            script.luminance_amplitude = args.amplitude;
            script.local_motion_fraction = args.motion_fraction;
        } else {
            raise(ErrorCode::invalid_script, "unknown kind or preset '" + args.kind + "'");
        }
        artifacts = write_sequence(script, args.kind, args.out_dir);
    }
    std::cerr << artifacts.log.pairs.size() + 1 << " frames written to " << args.out_dir << "\n";
    std::cout << artifacts.manifest_path.string() << "\n";
    return 0;
}

struct ReportArgs {
    std::vector<std::string> csv_paths;
    std::string json_out;
    std::string svg_out;
    std::string crop_ablation;
};

int run_report(const ReportArgs& args) {
    std::vector<AnalysisRecord> records;
    for (const auto& path : args.csv_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(ErrorCode::io_error, "cannot read CSV '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        auto parsed = parse_csv(buf.str());
        records.insert(records.end(), std::make_move_iterator(parsed.begin()),
                       std::make_move_iterator(parsed.end()));
    }
    const SummaryMap summaries = summarize_records(records);
    bool wrote = false;
    if (!args.json_out.empty()) {
        write_file_or_stdout(summaries_to_json(summaries, args.crop_ablation), args.json_out);
        wrote = true;
    }
    if (!args.svg_out.empty()) {
        write_file_or_stdout(summaries_to_svg(summaries), args.svg_out);
        wrote = true;
    }
    if (!wrote) std::cout << summaries_to_json(summaries, args.crop_ablation);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scene statistics for image sequences: analyze, synthesize, report"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "compute per-pair statistics for a dataset");
    analyze->add_option("manifest", analyze_args.manifest_path, "dataset manifest path")
        ->required();
    analyze->add_option("-o,--output", analyze_args.output, "CSV output path, '-' for stdout");
    analyze->add_option("--feature-budget", analyze_args.config.feature_budget,
                        "keypoints per frame")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--ratio-threshold", analyze_args.config.ratio_threshold,
                        "match ratio-test threshold")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    analyze->add_option("--ransac-iters", analyze_args.config.ransac_iters, "RANSAC iterations")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--ransac-threshold-px", analyze_args.config.ransac_threshold_px,
                        "RANSAC inlier threshold in pixels");
    analyze->add_option("--seed", analyze_args.config.seed, "pseudo-random seed");
    analyze->add_option("--jobs", analyze_args.config.jobs, "worker threads (0 = auto)");
    analyze->add_option("--normalize", analyze_args.normalize, "intensity normalization")
        ->check(CLI::IsMember({"global", "per-frame"}));
    analyze->add_option("--crop", analyze_args.crop, "bottom-half or L,T,W,H");
    analyze->add_option("--target-fps", analyze_args.target_fps, "override manifest target fps");
    analyze->add_option("--skip-frames", analyze_args.skip_frames,
                        "override manifest warm-up skip");

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic sequence");
    synth
        ->add_option("kind", synth_args.kind,
                     "static|flicker|translate|mixed or preset forestlike|officelike")
        ->required();
    synth->add_option("-o,--output", synth_args.out_dir, "output directory")->required();
    synth->add_option("--seed", synth_args.seed, "texture seed");
    synth->add_option("-n,--frames", synth_args.n_frames, "frame count");
    synth->add_option("--width", synth_args.width, "frame width");
    synth->add_option("--height", synth_args.height, "frame height");
    synth->add_option("--amplitude", synth_args.amplitude, "flicker amplitude");
    synth->add_option("--dx", synth_args.dx, "translation px/frame, x");
    synth->add_option("--dy", synth_args.dy, "translation px/frame, y");
    synth->add_option("--motion-fraction", synth_args.motion_fraction,
                      "fraction of blocks re-randomized per frame (mixed)");
    synth->add_option("--noise-sigma", synth_args.noise_sigma, "sensor noise sigma");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "summarize analysis CSVs");
    report->add_option("csv", report_args.csv_paths, "analysis CSV files")->required();
    report->add_option("--json", report_args.json_out, "summary JSON path, '-' for stdout");
    report->add_option("--svg", report_args.svg_out, "box-plot SVG path, '-' for stdout");
    report->add_option("--crop-ablation", report_args.crop_ablation,
                       "note recorded in JSON metadata");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
    }

    try {
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (synth->parsed()) return run_synth(synth_args);
        if (report->parsed()) return run_report(report_args);
    } catch (const scenestat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
