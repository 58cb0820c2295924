#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "toposcore/match.hpp"
#include "toposcore/topo_extract.hpp"

namespace toposcore {

inline constexpr double kDefaultTLow = 0.3;
inline constexpr double kDefaultTHigh = 0.7;
inline constexpr std::size_t kDefaultMinComponentSize = 5;

struct ScoreConfig {
    double t_low = kDefaultTLow;
    double t_high = kDefaultTHigh;
    MatchConfig match{};
    std::size_t min_component_size = kDefaultMinComponentSize;

    /// 0 <= t_low < t_high <= 1, r > 0, min size >= 1.
    void validate() const;
};

/// Density-robust overlap of two matched node sets: the mean matched fraction
/// of both clouds divided by the mean of (matched + 2 unmatched) / size.
/// Requires both clouds non-empty.
double point_cloud_iou(const MatchCounts& c);

/// (tp_gt + tp_p) / (tp_gt + tp_p + 2 fp + 2 fn); sensitive to node density.
double naive_iou(const MatchCounts& c);

/// x < t_low -> 0, x > t_high -> 1, otherwise unchanged.
double threshold_iou(double x, double t_low, double t_high) noexcept;

/// L_gt x L_p matrix of thresholded point-cloud IoUs; rows are GT features,
/// columns predicted features.
struct ScoreMatrix {
    FeatureKind kind = FeatureKind::loop;
    std::size_t rows = 0, cols = 0;
    std::vector<double> raw;          // row-major IoU before thresholding
    std::vector<double> entries;      // row-major, thresholded
    std::vector<double> gt_scores;    // min(1, row sum), recall analogue
    std::vector<double> pred_scores;  // min(1, column sum), precision analogue

    double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

ScoreMatrix build_score_matrix(const std::vector<TopoFeature>& gt_feats, const std::vector<TopoFeature>& pred_feats,
                               const ScoreConfig& cfg);

/// Fills entries / gt_scores / pred_scores from `raw`.
void finish_score_matrix(ScoreMatrix& m, const ScoreConfig& cfg);

/// Mean of the two clipped-score means; 1 when both sides are empty and
/// 1 / (1 + n) when only one side is, n being the other side's feature count.
double score_side(const ScoreMatrix& m, std::size_t n_gt, std::size_t n_pred);

struct FeatureCounts {
    std::size_t gt_components = 0, gt_loops = 0;
    std::size_t pred_components = 0, pred_loops = 0;
};

struct TopoReport {
    double loop_score = 0;
    double component_score = 0;
    double topology_score = 0;
    std::optional<double> voxel_iou;
    FeatureCounts counts;
    ScoreMatrix loop_matrix;
    ScoreMatrix component_matrix;
    ScoreConfig config;
};

TopoReport topology_score(const SkeletonGraph& gt, const SkeletonGraph& pred, const ScoreConfig& cfg = {});

/// Scoring from decompositions that were already extracted with cfg.min_component_size.
TopoReport topology_score(const TopoDecomposition& gt, const TopoDecomposition& pred, const ScoreConfig& cfg);

}  // namespace toposcore
