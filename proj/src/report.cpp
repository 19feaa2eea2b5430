#include "scenestat/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "scenestat/features.hpp"
#include "scenestat/reproject.hpp"
#include "parallel.hpp"

namespace scenestat {

namespace {

constexpr int kLaplacianWidth = 320;
constexpr int kLaplacianHeight = 240;

const char* kCsvHeader =
    "dataset,pair_index,luminance,rms_contrast,laplacian_variance,d_luminance,d_contrast,"
    "kl_divergence,match_count,reproj_mse";

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt9(*v) : std::string(); }

uint64_t pair_seed(uint64_t base, int pair_index) {
    // per-pair stream so parallel execution is order-independent
    uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<uint64_t>(pair_index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double quantile(const std::vector<double>& sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(h);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct FrameProduct {
    GrayFrame frame;
    FrameStats stats;
    Histogram256 histogram;
    FeatureSet features;
};

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.push_back("");
    return fields;
}

}  // namespace

const std::vector<std::string>& statistic_names() {
    static const std::vector<std::string> names = {
        "d_luminance", "d_contrast", "kl_divergence",
        "laplacian_variance", "match_count", "reproj_mse"};
    return names;
}

std::vector<AnalysisRecord> analyze_sequence(const DatasetManifest& manifest,
                                             const RunConfig& config) {
    const auto files = list_frame_files(manifest);
    const auto indices = sample_indices(manifest, static_cast<int>(files.size()));
    if (indices.size() < 2) {
        raise(ErrorCode::empty_sequence,
              "sequence '" + manifest.name + "' yields " + std::to_string(indices.size()) +
                  " sampled frame(s); need at least 2");
    }

    FeatureConfig feature_config;
    feature_config.budget = config.feature_budget;
    feature_config.ratio_threshold = config.ratio_threshold;
    RansacConfig ransac_config;
    ransac_config.iters = config.ransac_iters;
    ransac_config.inlier_threshold_px = config.ransac_threshold_px;

    // per-frame pass: load, preprocess, frame stats, histogram, features
    std::vector<FrameProduct> products(indices.size());
    detail::parallel_for(indices.size(), config.jobs, [&](size_t i) {
        const auto& path = files[indices[i]];
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(ErrorCode::io_error, "cannot read frame '" + path.string() + "'");
        std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
        AnyFrame raw;
        try {
            raw = parse_netpbm(bytes);
        } catch (const Error& e) {
            raise(e.code(), path.string() + ": " + e.what());
        }
        FrameProduct& p = products[i];
        p.frame = preprocess_frame(raw, manifest, config.normalize);
        p.stats.luminance = luminance(p.frame);
        p.stats.rms_contrast = rms_contrast(p.frame);
        p.stats.laplacian_variance =
            (p.frame.width == kLaplacianWidth && p.frame.height == kLaplacianHeight)
                ? laplacian_variance(p.frame)
                : laplacian_variance(resize_bilinear(p.frame, kLaplacianWidth, kLaplacianHeight));
        p.histogram = intensity_histogram(p.frame);
        p.features = extract_features(p.frame, feature_config);
    });

    // per-pair pass
    std::vector<PairStats> pair_stats(indices.size() - 1);
    detail::parallel_for(pair_stats.size(), config.jobs, [&](size_t k) {
        const FrameProduct& prev = products[k];
        const FrameProduct& curr = products[k + 1];
        PairStats& pair = pair_stats[k];
        const PairDeltas deltas = pair_deltas(prev.stats, curr.stats);
        pair.d_luminance = deltas.d_luminance;
        pair.d_contrast = deltas.d_contrast;
        pair.kl_divergence = kl_divergence(curr.histogram, prev.histogram);
        pair.match_count = static_cast<int>(
            match_features(curr.features, prev.features, config.ratio_threshold).size());
        RansacConfig pair_ransac = ransac_config;
        pair_ransac.seed = pair_seed(config.seed, static_cast<int>(k) + 1);
        pair.reproj_mse = reprojected_mse(prev.frame, curr.frame, prev.features, curr.features,
                                          config.ratio_threshold, pair_ransac);
    });

    std::vector<AnalysisRecord> records(indices.size());
    for (size_t i = 0; i < indices.size(); ++i) {
        records[i].dataset = manifest.name;
        records[i].pair_index = static_cast<int>(i);
        records[i].frame = products[i].stats;
        if (i > 0) records[i].pair = pair_stats[i - 1];
    }
    return records;
}

DistributionSummary summarize(const std::vector<std::optional<double>>& values) {
    std::vector<double> present;
    present.reserve(values.size());
    size_t missing = 0;
    for (const auto& v : values) {
        if (v) {
            present.push_back(*v);
        } else {
            ++missing;
        }
    }
    if (present.empty()) raise(ErrorCode::all_missing, "no present values to summarize");
    std::sort(present.begin(), present.end());

    DistributionSummary s;
    s.n = present.size();
    s.n_missing = missing;
    s.min = present.front();
    s.max = present.back();
    s.q1 = quantile(present, 0.25);
    s.median = quantile(present, 0.5);
    s.q3 = quantile(present, 0.75);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    // smallest/largest datum inside the fences; max >= q1 and min <= q3 keep
    // both searches non-empty
    s.lower_whisker = *std::lower_bound(present.begin(), present.end(), lo_fence);
    s.upper_whisker = *std::prev(std::upper_bound(present.begin(), present.end(), hi_fence));
    return s;
}

SummaryMap summarize_records(const std::vector<AnalysisRecord>& records) {
    std::map<std::string, std::vector<const AnalysisRecord*>> by_dataset;
    for (const auto& r : records) by_dataset[r.dataset].push_back(&r);

    SummaryMap result;
    for (const auto& [dataset, rows] : by_dataset) {
        std::map<std::string, std::vector<std::optional<double>>> columns;
        for (const AnalysisRecord* r : rows) {
            columns["laplacian_variance"].push_back(r->frame.laplacian_variance);
            if (!r->pair) continue;
            columns["d_luminance"].push_back(r->pair->d_luminance);
            columns["d_contrast"].push_back(r->pair->d_contrast);
            columns["kl_divergence"].push_back(r->pair->kl_divergence);
            columns["match_count"].push_back(static_cast<double>(r->pair->match_count));
            columns["reproj_mse"].push_back(r->pair->reproj_mse);
        }
        for (const std::string& stat : statistic_names()) {
            const auto& values = columns[stat];
            SummaryEntry entry;
            const bool any_present =
                std::any_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); });
            if (any_present) {
                entry.summary = summarize(values);
                entry.n_missing = entry.summary->n_missing;
            } else {
                entry.n_missing = values.size();
            }
            result[dataset][stat] = entry;
        }
    }
    return result;
}

std::string records_to_csv(const std::vector<AnalysisRecord>& records) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.dataset << ',' << r.pair_index << ',' << fmt9(r.frame.luminance) << ','
            << fmt_opt(r.frame.rms_contrast) << ',' << fmt9(r.frame.laplacian_variance) << ',';
        if (r.pair) {
            out << fmt9(r.pair->d_luminance) << ',' << fmt_opt(r.pair->d_contrast) << ','
                << fmt9(r.pair->kl_divergence) << ',' << r.pair->match_count << ','
                << fmt_opt(r.pair->reproj_mse);
        } else {
            out << ",,,,";
        }
        out << '\n';
    }
    return out.str();
}

std::vector<AnalysisRecord> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        raise(ErrorCode::invalid_value, "unrecognized CSV header");
    }
    std::vector<AnalysisRecord> records;
    size_t line_no = 1;
    auto opt_field = [](const std::string& f) -> std::optional<double> {
        if (f.empty()) return std::nullopt;
        return std::stod(f);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 10) {
            raise(ErrorCode::invalid_value,
                  "CSV line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected 10");
        }
        try {
            AnalysisRecord r;
            r.dataset = fields[0];
            r.pair_index = std::stoi(fields[1]);
            r.frame.luminance = std::stod(fields[2]);
            r.frame.rms_contrast = opt_field(fields[3]);
            r.frame.laplacian_variance = std::stod(fields[4]);
            if (!fields[5].empty()) {
                PairStats pair;
                pair.d_luminance = std::stod(fields[5]);
                pair.d_contrast = opt_field(fields[6]);
                pair.kl_divergence = std::stod(fields[7]);
                pair.match_count = std::stoi(fields[8]);
                pair.reproj_mse = opt_field(fields[9]);
                r.pair = pair;
            }
            records.push_back(std::move(r));
        } catch (const std::exception&) {
            raise(ErrorCode::invalid_value, "malformed CSV line " + std::to_string(line_no));
        }
    }
    return records;
}

std::string summaries_to_json(const SummaryMap& summaries, const std::string& crop_ablation_note) {
    nlohmann::json doc(nlohmann::json::value_t::object);
    for (const auto& [dataset, stats] : summaries) {
        nlohmann::json ds(nlohmann::json::value_t::object);
        for (const auto& [stat, entry] : stats) {
            if (entry.summary) {
                const DistributionSummary& s = *entry.summary;
                ds[stat] = {{"n", s.n},
                            {"min", s.min},
                            {"q1", s.q1},
                            {"median", s.median},
                            {"q3", s.q3},
                            {"max", s.max},
                            {"lower_whisker", s.lower_whisker},
                            {"upper_whisker", s.upper_whisker},
                            {"n_missing", s.n_missing}};
            } else {
                ds[stat] = {{"all_missing", true}, {"n_missing", entry.n_missing}};
            }
        }
        doc[dataset] = std::move(ds);
    }
    if (!crop_ablation_note.empty()) {
        doc["_metadata"] = {{"crop_ablation", crop_ablation_note}};
    }
    return doc.dump(2) + "\n";
}

SummaryMap parse_summary_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        raise(ErrorCode::invalid_value, "malformed summary JSON");
    }
    SummaryMap summaries;
    for (const auto& [dataset, stats] : doc.items()) {
        if (dataset == "_metadata") continue;
        for (const auto& [stat, value] : stats.items()) {
            SummaryEntry entry;
            if (value.contains("all_missing") && value["all_missing"].get<bool>()) {
                entry.n_missing = value["n_missing"].get<size_t>();
            } else {
                DistributionSummary s;
                s.n = value["n"].get<size_t>();
                s.min = value["min"].get<double>();
                s.q1 = value["q1"].get<double>();
                s.median = value["median"].get<double>();
                s.q3 = value["q3"].get<double>();
                s.max = value["max"].get<double>();
                s.lower_whisker = value["lower_whisker"].get<double>();
                s.upper_whisker = value["upper_whisker"].get<double>();
                s.n_missing = value["n_missing"].get<size_t>();
                entry.summary = s;
                entry.n_missing = s.n_missing;
            }
            summaries[dataset][stat] = entry;
        }
    }
    return summaries;
}

namespace {

const char* kPalette[] = {"#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2"};

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

std::string summaries_to_svg(const SummaryMap& summaries) {
    std::vector<std::string> datasets;
    for (const auto& [name, _] : summaries) datasets.push_back(name);

    const double width = 760.0;
    const double margin = 16.0;
    const double label_w = 170.0;
    const double row_h = 26.0;
    const double panel_header = 22.0;
    const double axis_h = 20.0;
    const double panel_gap = 10.0;
    const double plot_x = margin + label_w;
    const double plot_w = width - plot_x - margin;
    const double panel_h = panel_header + datasets.size() * row_h + axis_h;
    const double height =
        2 * margin + statistic_names().size() * panel_h +
        (statistic_names().size() - 1) * panel_gap;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << fmt_coord(height) << "\" viewBox=\"0 0 " << width << " "
        << fmt_coord(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << fmt_coord(height)
        << "\" fill=\"white\"/>\n";

    double y = margin;
    for (const std::string& stat : statistic_names()) {
        // axis range across datasets, from summary extrema
        double lo = 0.0, hi = 0.0;
        bool have_range = false;
        for (const auto& ds : datasets) {
            const auto it = summaries.at(ds).find(stat);
            if (it == summaries.at(ds).end() || !it->second.summary) continue;
            const auto& s = *it->second.summary;
            lo = have_range ? std::min(lo, s.min) : s.min;
            hi = have_range ? std::max(hi, s.max) : s.max;
            have_range = true;
        }
        if (!have_range) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const auto sx = [&](double v) { return plot_x + (v - lo) / (hi - lo) * plot_w; };

        svg << "<text x=\"" << fmt_coord(margin) << "\" y=\"" << fmt_coord(y + 14)
            << "\" font-weight=\"bold\">" << stat << "</text>\n";

        for (size_t i = 0; i < datasets.size(); ++i) {
            const double cy = y + panel_header + i * row_h + row_h / 2;
            svg << "<text x=\"" << fmt_coord(plot_x - 8) << "\" y=\"" << fmt_coord(cy + 4)
                << "\" text-anchor=\"end\">" << datasets[i] << "</text>\n";
            const auto it = summaries.at(datasets[i]).find(stat);
            if (it == summaries.at(datasets[i]).end() || !it->second.summary) {
                const size_t missing = it == summaries.at(datasets[i]).end() ? 0 : it->second.n_missing;
                svg << "<text x=\"" << fmt_coord(plot_x + 4) << "\" y=\"" << fmt_coord(cy + 4)
                    << "\" fill=\"#999\">all values missing (n_missing=" << missing
                    << ")</text>\n";
                continue;
            }
            const DistributionSummary& s = *it->second.summary;
            const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
            // whisker span with end caps
            svg << "<line x1=\"" << fmt_coord(sx(s.lower_whisker)) << "\" y1=\"" << fmt_coord(cy)
                << "\" x2=\"" << fmt_coord(sx(s.upper_whisker)) << "\" y2=\"" << fmt_coord(cy)
                << "\" stroke=\"#555\"/>\n";
            for (double wv : {s.lower_whisker, s.upper_whisker}) {
                svg << "<line x1=\"" << fmt_coord(sx(wv)) << "\" y1=\"" << fmt_coord(cy - 5)
                    << "\" x2=\"" << fmt_coord(sx(wv)) << "\" y2=\"" << fmt_coord(cy + 5)
                    << "\" stroke=\"#555\"/>\n";
            }
            const double bx = sx(s.q1);
            const double bw = std::max(1.0, sx(s.q3) - bx);
            svg << "<rect x=\"" << fmt_coord(bx) << "\" y=\"" << fmt_coord(cy - 8) << "\" width=\""
                << fmt_coord(bw) << "\" height=\"16\" fill=\"" << color
                << "\" fill-opacity=\"0.6\" stroke=\"#333\"/>\n";
            svg << "<line x1=\"" << fmt_coord(sx(s.median)) << "\" y1=\"" << fmt_coord(cy - 8)
                << "\" x2=\"" << fmt_coord(sx(s.median)) << "\" y2=\"" << fmt_coord(cy + 8)
                << "\" stroke=\"#111\" stroke-width=\"2\"/>\n";
        }

        const double axis_y = y + panel_header + datasets.size() * row_h + 6;
        svg << "<line x1=\"" << fmt_coord(plot_x) << "\" y1=\"" << fmt_coord(axis_y) << "\" x2=\""
            << fmt_coord(plot_x + plot_w) << "\" y2=\"" << fmt_coord(axis_y)
            << "\" stroke=\"#999\"/>\n";
        svg << "<text x=\"" << fmt_coord(plot_x) << "\" y=\"" << fmt_coord(axis_y + 12)
            << "\" fill=\"#666\">" << fmt_label(lo) << "</text>\n";
        svg << "<text x=\"" << fmt_coord(plot_x + plot_w) << "\" y=\"" << fmt_coord(axis_y + 12)
            << "\" text-anchor=\"end\" fill=\"#666\">" << fmt_label(hi) << "</text>\n";
        y += panel_h + panel_gap;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace scenestat
