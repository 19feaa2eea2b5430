#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenestat/sequence.hpp"
#include "scenestat/stats.hpp"

namespace scenestat {

struct RunConfig {
    int feature_budget = 100;
    double ratio_threshold = 0.75;
    int ransac_iters = 1000;
    double ransac_threshold_px = 3.0;
    uint64_t seed = 0;
    int jobs = 0;  // <= 0 means available parallelism
    NormalizeMode normalize = NormalizeMode::global;
};

// One row of the analysis: frame stats for the sampled frame, pair stats
// against the previous sampled frame. The first sampled frame carries frame
// stats only.
struct AnalysisRecord {
    std::string dataset;
    int pair_index = 0;
    FrameStats frame;
    std::optional<PairStats> pair;
};

// Five-number summary with Tukey whiskers (1.5 * IQR fences clipped to the
// data). Quartiles by linear interpolation at p * (n - 1).
struct DistributionSummary {
    size_t n = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double lower_whisker = 0.0;
    double upper_whisker = 0.0;
    size_t n_missing = 0;

    bool operator==(const DistributionSummary&) const = default;
};

// Summary per statistic; `summary` is absent when every value was missing.
struct SummaryEntry {
    std::optional<DistributionSummary> summary;
    size_t n_missing = 0;

    bool operator==(const SummaryEntry&) const = default;
};

// dataset -> statistic -> summary
using SummaryMap = std::map<std::string, std::map<std::string, SummaryEntry>>;

// The six reported statistics, in presentation order.
const std::vector<std::string>& statistic_names();

// Runs the full pipeline over a manifest: sampled frames are preprocessed,
// per-frame stats computed (Laplacian variance on the 320x240 resize), and
// adjacent pairs analyzed. Pair computations may run on `jobs` workers; the
// emitted order is always frame order.
std::vector<AnalysisRecord> analyze_sequence(const DatasetManifest& manifest,
                                             const RunConfig& config = {});

// Excludes missing values (counted in n_missing). Raises AllMissing when no
// value is present.
DistributionSummary summarize(const std::vector<std::optional<double>>& values);

// Groups records by dataset and summarizes each statistic.
SummaryMap summarize_records(const std::vector<AnalysisRecord>& records);

// CSV with the fixed column set; numbers rendered to at most 9 significant
// digits, missing values as empty fields.
std::string records_to_csv(const std::vector<AnalysisRecord>& records);
std::vector<AnalysisRecord> parse_csv(const std::string& text);

std::string summaries_to_json(const SummaryMap& summaries,
                              const std::string& crop_ablation_note = {});
SummaryMap parse_summary_json(const std::string& text);

// Grouped box plots, one panel per statistic, one box per dataset. SVG 1.1,
// self-contained.
std::string summaries_to_svg(const SummaryMap& summaries);

}  // namespace scenestat
