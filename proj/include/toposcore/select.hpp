#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toposcore/score.hpp"
#include "toposcore/skeleton.hpp"
#include "toposcore/volume.hpp"

namespace toposcore {

enum class InputKind { volume, skeleton };

/// Volume headers carry "dims", skeleton files carry "nodes".
InputKind detect_input_kind(const std::filesystem::path& path);

/// Ground truth or prediction given either as a voxel mask or as a skeleton.
/// `volume` is set for voxel inputs; `skeleton` is always filled (thinned for
/// voxel inputs).
struct SkeletonInput {
    std::optional<Volume> volume;
    SkeletonGraph skeleton;
};

/// Loads a binary volume (and skeletonizes it) or a skeleton JSON.
SkeletonInput load_skeleton_input(const std::filesystem::path& path);

enum class SweepMetric { voxel_iou, topology_score, both };

const char* metric_name(SweepMetric m) noexcept;
SweepMetric parse_metric(const std::string& s);

/// 0.1, 0.2, ..., 0.9
std::vector<double> default_thresholds();

struct SweepItem {
    std::string name;
    std::filesystem::path prob;  // f32 probability map
    std::filesystem::path gt;    // binary volume or skeleton JSON
};

struct SweepSpec {
    std::vector<double> thresholds = default_thresholds();
    SweepMetric metric = SweepMetric::both;
    std::vector<SweepItem> dataset;
    ScoreConfig cfg{};

    /// Thresholds strictly increasing inside (0, 1), dataset non-empty, cfg valid.
    void validate() const;
};

/// {"thresholds": [...], "metric": "both", "config": {...},
///  "items": [{"name": "a", "prob": "a_prob.json", "gt": "a_gt.json"}, ...]}
/// Relative paths are resolved against the manifest's directory.
SweepSpec load_sweep_manifest(const std::filesystem::path& path);

struct SweepRow {
    std::string item;
    double threshold = 0;
    std::optional<double> voxel_iou;  // absent when the GT is a skeleton
    double topo_score = 0;
    double loop_score = 0;
    double component_score = 0;
    double entropy = 0;
};

struct MeanStd {
    double mean = 0;
    double std = 0;  // population
    std::size_t n = 0;
};

struct ThresholdSummary {
    double threshold = 0;
    MeanStd voxel_iou, topo_score, loop_score, component_score;
};

struct SkippedItem {
    std::string item;
    std::string reason;
};

struct SweepResult {
    std::vector<double> thresholds;
    SweepMetric metric = SweepMetric::both;
    ScoreConfig cfg{};
    std::vector<SweepRow> rows;  // item-major, thresholds ascending within an item
    std::vector<ThresholdSummary> summary;
    std::vector<SkippedItem> skipped;
    std::optional<double> best_voxel_iou;  // argmax of the mean; ties go to the lower threshold
    std::optional<double> best_topology;
};

/// Scores every item at every threshold. Items that fail to load are listed
/// in `skipped` and left out of the aggregates.
SweepResult run_sweep(const SweepSpec& spec);

nlohmann::json to_json(const SweepResult& r);

/// Writes `<stem>.csv` (one row per item and threshold) and `<stem>.json`
/// (rows, per-threshold aggregates and the selected thresholds). `path` may
/// carry either extension or none.
void emit_report(const SweepResult& r, const std::filesystem::path& path);

}  // namespace toposcore
