#pragma once

// Training, full and pruned classification, transition detection,
// benchmarking and model persistence.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "faup/faucodes.hpp"
#include "faup/imaging.hpp"
#include "faup/mlcore.hpp"
#include "faup/ruleengine.hpp"
#include "faup/synthgen.hpp"

namespace faup {

enum class FeatureMode { landmark, image };
enum class CannyOrder { pca_components, raw };
enum class PatchSource { edges, luminance };

std::string_view to_string(FeatureMode m) noexcept;
std::string_view to_string(CannyOrder o) noexcept;
std::string_view to_string(PatchSource s) noexcept;
std::optional<FeatureMode> parse_feature_mode(std::string_view s) noexcept;

struct BundleConfig {
    FeatureMode mode = FeatureMode::landmark;
    int work_width = kWorkingWidth;
    int work_height = kWorkingHeight;
    int components = 10;  // clamped to (training samples - 1)
    int patch_radius = 3;
    PatchSource patch_source = PatchSource::edges;
    CannyParams canny;
    CannyOrder canny_order = CannyOrder::pca_components;
    double svm_c = 1.0;
    double split_ratio = 1.0 / 3.0;
    std::uint64_t seed = 42;
    // AU-presence tolerance as a fraction of the expression intensity.
    double tau_factor = 0.5;

    void validate() const;
    bool operator==(const BundleConfig&) const = default;
};

struct TrainedBundle {
    BundleConfig config;
    // Mean expression magnitude seen in training, in normalized face units.
    // Landmark features are divided by it, and tau is relative to it.
    double intensity = 0.0;
    std::optional<PcaModel> pca;  // image mode only
    std::array<SvmModel, 6> detectors;  // indexed by emotion; positive = "not e"

    double tau() const { return config.tau_factor * intensity; }
    bool operator==(const TrainedBundle&) const = default;
};

struct DataSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Per class: shuffle with the seed, then take a share of round(ratio * N)
// training samples (at least one per class; leftover slots go by largest
// remainder, ties in emotion order).
DataSplit split_dataset(const std::vector<LabeledSample>& data, double ratio, std::uint64_t seed);

struct DetectorStats {
    double correctness = 0.0;  // on the held-out split
    int sv_count = 0;
    double margin = 0.0;
};

struct TrainResult {
    TrainedBundle bundle;
    DataSplit split;
    std::array<DetectorStats, 6> detectors;
};

TrainResult train(const std::vector<LabeledSample>& data, const BundleConfig& cfg);

// Landmark mode: normalized displacement of each monitored point against the
// neutral template (x, y per point, canonical order) divided by the bundle
// intensity. Image mode: patch vector over the monitored points.
std::vector<double> extract_features(const TrainedBundle& b, const LabeledSample& s, PointSet monitored);

struct FullResult {
    Emotion emotion = Emotion::surprise;
    std::array<double, 6> scores{};  // not-emotion detector scores
    // Every detector votes "absent", or the winning detector's weighted
    // features add nothing towards "present" (w.x >= 0).
    bool low_confidence = false;
};

FullResult classify_full(const TrainedBundle& b, const LabeledSample& s);

struct PrunedResult {
    EmotionDecision decision;  // final decision after any fallback
    std::optional<Emotion> emotion;
    // Size of the monitoring plan that carried the decision (the largest
    // considered one when none did), plus 24 when the full path ran.
    int points_examined = 0;
    // Distinct feature points actually normalized by the rule stage.
    int points_read = 0;
    bool fallback = false;
    AUObservation observation;
    std::optional<TransitionRule> evidence;  // set when a prior was given
};

PrunedResult classify_pruned(const TrainedBundle& b, const LabeledSample& s, std::optional<Emotion> prior = std::nullopt);

struct TransitionEvent {
    std::size_t frame = 0;
    Emotion from = Emotion::surprise;
    Emotion to = Emotion::fear;
    TransitionRule evidence;
    bool heuristic = false;  // rule derived rather than tabulated
};

// A change is reported at the first of two consecutive frames that both
// satisfy the same transition out of the current state.
std::vector<TransitionEvent> detect_transitions(const TrainedBundle& b, const Sequence& seq);

struct BenchRow {
    Emotion emotion = Emotion::surprise;
    int full_points = 24;
    int pruned_points = 0;
    double reduction = 0.0;
    double mean_points_examined = 0.0;
    double full_seconds_per_sample = 0.0;
    double pruned_seconds_per_sample = 0.0;
    std::size_t samples = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double mean_reduction = 0.0;
    double full_seconds_per_sample = 0.0;
    double pruned_seconds_per_sample = 0.0;
    double accuracy_full = 0.0;
    double accuracy_pruned = 0.0;
    double agreement = 0.0;
    double fallback_rate = 0.0;
    std::array<DetectorStats, 6> detectors;  // SVM detectors alone
    // "not e" correctness of the pruned path's final decision.
    std::array<double, 6> pruned_label_correctness{};
    std::size_t samples = 0;

    std::string to_tsv() const;
    std::string summary() const;
};

// `timing_repeats` = 0 picks a repeat count that keeps each timed loop above
// a few milliseconds.
BenchReport bench_compare(const TrainedBundle& b, const std::vector<LabeledSample>& data, int timing_repeats = 0);

std::uint64_t fnv1a64(std::string_view bytes);
std::string serialize_bundle(const TrainedBundle& b);
TrainedBundle parse_bundle(std::string_view text);
void save_bundle(const TrainedBundle& b, const std::filesystem::path& path);
TrainedBundle load_bundle(const std::filesystem::path& path);

}  // namespace faup
