#include "toposcore/score.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "toposcore/error.hpp"

namespace toposcore {

void ScoreConfig::validate() const {
    if (!(t_low >= 0.0 && t_low < t_high && t_high <= 1.0))
        throw Error(Errc::invalid_argument, "thresholds must satisfy 0 <= t_low < t_high <= 1");
    match.validate();
    if (min_component_size < 1) throw Error(Errc::invalid_argument, "min component size must be >= 1");
}

double point_cloud_iou(const MatchCounts& c) {
    const auto n_gt = c.tp_gt + c.fn;
    const auto n_p = c.tp_p + c.fp;
    if (n_gt == 0 || n_p == 0) throw Error(Errc::empty_feature, "point_cloud_iou needs two non-empty clouds");
    const double tp_gt = static_cast<double>(c.tp_gt), fn = static_cast<double>(c.fn);
    const double tp_p = static_cast<double>(c.tp_p), fp = static_cast<double>(c.fp);
    const double num = tp_gt / (tp_gt + fn) + tp_p / (tp_p + fp);
    const double den = (tp_gt + 2.0 * fn) / (tp_gt + fn) + (tp_p + 2.0 * fp) / (tp_p + fp);
    return num / den;
}

double naive_iou(const MatchCounts& c) {
    if (c.tp_gt == 0 && c.tp_p == 0 && c.fp == 0 && c.fn == 0)
        throw Error(Errc::empty_feature, "naive_iou needs at least one node");
    const double tp = static_cast<double>(c.tp_gt) + static_cast<double>(c.tp_p);
    return tp / (tp + 2.0 * static_cast<double>(c.fp) + 2.0 * static_cast<double>(c.fn));
}

double threshold_iou(double x, double t_low, double t_high) noexcept {
    if (x < t_low) return 0.0;
    if (x > t_high) return 1.0;
    return x;
}

namespace {

struct IndexedFeature {
    std::vector<Point3> points;
    std::unique_ptr<PointIndex> index;
};

std::vector<IndexedFeature> index_features(const std::vector<TopoFeature>& feats, double radius) {
    std::vector<IndexedFeature> out;
    out.reserve(feats.size());
    for (const auto& f : feats) {
        IndexedFeature x{f.points(), nullptr};
        if (x.points.empty()) throw Error(Errc::empty_feature, "feature without nodes");
        x.index = std::make_unique<PointIndex>(x.points, radius);
        out.push_back(std::move(x));
    }
    return out;
}

// Bounding boxes further apart than r on some axis cannot share a match.
bool boxes_apart(const PointIndex& a, const PointIndex& b, double r) {
    const auto alo = a.lo(), ahi = a.hi(), blo = b.lo(), bhi = b.hi();
    return blo.x - ahi.x > r || alo.x - bhi.x > r || blo.y - ahi.y > r || alo.y - bhi.y > r ||
           blo.z - ahi.z > r || alo.z - bhi.z > r;
}

}  // namespace

void finish_score_matrix(ScoreMatrix& m, const ScoreConfig& cfg) {
    m.entries.resize(m.raw.size());
    std::transform(m.raw.begin(), m.raw.end(), m.entries.begin(),
                   [&](double x) { return threshold_iou(x, cfg.t_low, cfg.t_high); });
    m.gt_scores.assign(m.rows, 0.0);
    m.pred_scores.assign(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += m.entries[i * m.cols + j];
        m.gt_scores[i] = std::min(1.0, s);
    }
    for (std::size_t j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) s += m.entries[i * m.cols + j];
        m.pred_scores[j] = std::min(1.0, s);
    }
}

ScoreMatrix build_score_matrix(const std::vector<TopoFeature>& gt_feats, const std::vector<TopoFeature>& pred_feats,
                               const ScoreConfig& cfg) {
    cfg.validate();
    ScoreMatrix m;
    if (!gt_feats.empty()) m.kind = gt_feats.front().kind;
    else if (!pred_feats.empty()) m.kind = pred_feats.front().kind;
    m.rows = gt_feats.size();
    m.cols = pred_feats.size();
    m.raw.assign(m.rows * m.cols, 0.0);

    const double r = cfg.match.radius;
    const auto gt = index_features(gt_feats, r);
    const auto pred = index_features(pred_feats, r);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) {
            MatchCounts c;
            if (boxes_apart(*gt[i].index, *pred[j].index, r)) {
                c.fn = gt[i].points.size();
                c.fp = pred[j].points.size();
            } else {
                c = match_indexed(gt[i].points, *gt[i].index, pred[j].points, *pred[j].index);
            }
            m.raw[i * m.cols + j] = point_cloud_iou(c);
        }
    finish_score_matrix(m, cfg);
    return m;
}

double score_side(const ScoreMatrix& m, std::size_t n_gt, std::size_t n_pred) {
    if (n_gt == 0 && n_pred == 0) return 1.0;
    if (n_gt == 0) return 1.0 / (1.0 + static_cast<double>(n_pred));
    if (n_pred == 0) return 1.0 / (1.0 + static_cast<double>(n_gt));
    if (m.gt_scores.size() != n_gt || m.pred_scores.size() != n_pred)
        throw Error(Errc::dimension_mismatch, "score matrix does not match the feature counts");
    double sg = 0.0, sp = 0.0;
    for (double v : m.gt_scores) sg += v;
    for (double v : m.pred_scores) sp += v;
    return (sg / static_cast<double>(n_gt) + sp / static_cast<double>(n_pred)) / 2.0;
}

TopoReport topology_score(const TopoDecomposition& gt, const TopoDecomposition& pred, const ScoreConfig& cfg) {
    cfg.validate();
    TopoReport rep;
    rep.config = cfg;
    rep.counts = {gt.num_components(), gt.num_loops(), pred.num_components(), pred.num_loops()};

    rep.component_matrix = build_score_matrix(gt.components, pred.components, cfg);
    rep.component_matrix.kind = FeatureKind::component;
    rep.loop_matrix = build_score_matrix(gt.loops, pred.loops, cfg);
    rep.loop_matrix.kind = FeatureKind::loop;

    rep.component_score = score_side(rep.component_matrix, gt.num_components(), pred.num_components());
    rep.loop_score = score_side(rep.loop_matrix, gt.num_loops(), pred.num_loops());
    rep.topology_score = (rep.loop_score + rep.component_score) / 2.0;
    return rep;
}

TopoReport topology_score(const SkeletonGraph& gt, const SkeletonGraph& pred, const ScoreConfig& cfg) {
    cfg.validate();
    gt.validate();
    pred.validate();
    return topology_score(decompose(gt, cfg.min_component_size), decompose(pred, cfg.min_component_size), cfg);
}

}  // namespace toposcore
