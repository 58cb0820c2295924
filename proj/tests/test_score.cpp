#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracle.hpp"
#include "test_util.hpp"
#include "toposcore/error.hpp"
#include "toposcore/report_json.hpp"
#include "toposcore/score.hpp"

using namespace toposcore;

namespace {

ScoreMatrix matrix_from_raw(std::size_t rows, std::size_t cols, std::vector<double> raw, const ScoreConfig& cfg = {}) {
    ScoreMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.raw = std::move(raw);
    finish_score_matrix(m, cfg);
    return m;
}

// n disjoint rings spaced far apart, each `nodes` long.
SkeletonGraph rings(std::size_t n, std::size_t nodes, double offset = 0) {
    SkeletonGraph g;
    for (std::size_t i = 0; i < n; ++i)
        testutil::append_graph(g, testutil::ring_graph(nodes, 6.0, offset + 100.0 * static_cast<double>(i), 0, 0));
    return g;
}

SkeletonGraph paths(std::size_t n, std::size_t nodes, double y) {
    SkeletonGraph g;
    for (std::size_t i = 0; i < n; ++i) testutil::append_graph(g, testutil::path_graph(nodes, 100.0 * static_cast<double>(i), y, 0));
    return g;
}

}  // namespace

TEST(PointCloudIou, HandValues) {
    EXPECT_NEAR(point_cloud_iou({3, 2, 1, 0}), 5.0 / 7.0, 1e-12);
    EXPECT_EQ(point_cloud_iou({7, 7, 0, 0}), 1.0);
    EXPECT_EQ(point_cloud_iou({0, 0, 4, 9}), 0.0);
    EXPECT_THROW(point_cloud_iou({0, 3, 0, 0}), Error);
}

TEST(NaiveIou, DensitySensitivity) {
    EXPECT_EQ(naive_iou({4, 4, 0, 0}), 1.0);
    EXPECT_NEAR(naive_iou({3, 2, 1, 0}), 5.0 / 7.0, 1e-12);
    // duplicating the prediction nodes: (3, 4, 2, 0) vs (3, 2, 1, 0)
    EXPECT_EQ(point_cloud_iou({3, 4, 2, 0}), point_cloud_iou({3, 2, 1, 0}));
    EXPECT_NE(naive_iou({3, 4, 2, 0}), naive_iou({3, 2, 1, 0}));
    EXPECT_THROW(naive_iou({0, 0, 0, 0}), Error);
}

TEST(Threshold, StrictInequalities) {
    EXPECT_EQ(threshold_iou(0.29, 0.3, 0.7), 0.0);
    EXPECT_EQ(threshold_iou(0.3, 0.3, 0.7), 0.3);
    EXPECT_EQ(threshold_iou(0.5, 0.3, 0.7), 0.5);
    EXPECT_EQ(threshold_iou(0.7, 0.3, 0.7), 0.7);
    EXPECT_EQ(threshold_iou(0.71, 0.3, 0.7), 1.0);
    double prev = 0;
    for (int k = 0; k <= 100; ++k) {
        const double v = threshold_iou(k / 100.0, 0.3, 0.7);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(ScoreConfig, Validation) {
    ScoreConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.t_low = 0.7;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.t_high = 1.01;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.match.radius = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.min_component_size = 0;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(ScoreMatrix, ThresholdingAndClipping) {
    const auto m = matrix_from_raw(1, 2, {0.9, 0.2});
    EXPECT_EQ(m.entries, (std::vector<double>{1.0, 0.0}));
    EXPECT_EQ(m.gt_scores, (std::vector<double>{1.0}));
    EXPECT_EQ(m.pred_scores, (std::vector<double>{1.0, 0.0}));
    EXPECT_EQ(score_side(m, 1, 2), 0.75);

    EXPECT_EQ(matrix_from_raw(1, 1, {0.5}).at(0, 0), 0.5);
    const auto two = matrix_from_raw(1, 2, {0.6, 0.6});
    EXPECT_EQ(two.gt_scores[0], 1.0);
    EXPECT_EQ(two.pred_scores, (std::vector<double>{0.6, 0.6}));
}

TEST(ScoreSide, EmptySides) {
    const ScoreMatrix none;
    EXPECT_EQ(score_side(none, 0, 0), 1.0);
    for (std::size_t k = 1; k <= 3; ++k) {
        EXPECT_EQ(score_side(none, 0, k), 1.0 / (1.0 + static_cast<double>(k)));
        EXPECT_EQ(score_side(none, k, 0), 1.0 / (1.0 + static_cast<double>(k)));
    }
}

TEST(TopologyScore, IdentityAndMean) {
    const auto g = rings(2, 12);
    const auto rep = topology_score(g, g);
    EXPECT_EQ(rep.topology_score, 1.0);
    EXPECT_EQ(rep.loop_score, 1.0);
    EXPECT_EQ(rep.component_score, 1.0);
    EXPECT_EQ(rep.counts.gt_loops, 2u);
    EXPECT_EQ(rep.counts.pred_components, 2u);
    EXPECT_EQ(rep.topology_score, (rep.loop_score + rep.component_score) / 2.0);
}

TEST(TopologyScore, EmptyGraphs) {
    const SkeletonGraph empty;
    EXPECT_EQ(topology_score(empty, empty).topology_score, 1.0);
    const auto g = rings(3, 10);
    const auto rep = topology_score(empty, g);
    EXPECT_EQ(rep.loop_score, 0.25);
    EXPECT_EQ(rep.component_score, 0.25);
}

TEST(TopologyScore, TwoLoopsSevenComponentsVsFiveLoops) {
    // GT: 2 loops in 7 components; prediction: 5 loops in 10 components,
    // sharing exactly one loop with the GT
    SkeletonGraph gt = rings(2, 12);
    testutil::append_graph(gt, paths(5, 8, 300));
    SkeletonGraph pred = rings(1, 12);
    testutil::append_graph(pred, rings(4, 12, 1000));
    testutil::append_graph(pred, paths(5, 8, -300));
    const auto rep = topology_score(gt, pred);
    EXPECT_EQ(rep.counts.gt_loops, 2u);
    EXPECT_EQ(rep.counts.gt_components, 7u);
    EXPECT_EQ(rep.counts.pred_loops, 5u);
    EXPECT_EQ(rep.counts.pred_components, 10u);
    ASSERT_EQ(rep.loop_matrix.rows, 2u);
    ASSERT_EQ(rep.loop_matrix.cols, 5u);
    std::size_t ones = 0, zeros = 0;
    for (double e : rep.loop_matrix.entries) {
        ones += e == 1.0;
        zeros += e == 0.0;
    }
    EXPECT_EQ(ones, 1u);
    EXPECT_EQ(zeros, 9u);
    EXPECT_DOUBLE_EQ(rep.loop_score, (0.5 + 0.2) / 2.0);
}

TEST(TopologyScore, SymmetricBitExact) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 30; ++t) {
        const auto a = testutil::random_graph(rng, 40, 60);
        const auto b = testutil::random_graph(rng, 40, 60);
        ScoreConfig cfg;
        cfg.min_component_size = 1 + t % 5;
        const auto ab = topology_score(a, b, cfg);
        const auto ba = topology_score(b, a, cfg);
        EXPECT_EQ(ab.topology_score, ba.topology_score);
        EXPECT_EQ(ab.loop_score, ba.loop_score);
        EXPECT_EQ(ab.component_score, ba.component_score);
    }
}

TEST(TopologyScore, MatchesBruteForceOracle) {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 100; ++t) {
        ScoreConfig cfg;
        cfg.match.radius = 2.0 + static_cast<double>(rng() % 80) / 10.0;
        std::vector<oracle::Cloud> gc, gl, pc, pl;
        for (std::size_t i = rng() % 6; i > 0; --i) gc.push_back(oracle::random_feature(rng, 30, 40, 6));
        for (std::size_t i = rng() % 6; i > 0; --i) gl.push_back(oracle::random_feature(rng, 30, 40, 6));
        for (std::size_t i = rng() % 6; i > 0; --i) pc.push_back(oracle::random_feature(rng, 30, 40, 6));
        for (std::size_t i = rng() % 6; i > 0; --i) pl.push_back(oracle::random_feature(rng, 30, 40, 6));
        const oracle::FeatureSet fgc(gc, FeatureKind::component), fgl(gl, FeatureKind::loop);
        const oracle::FeatureSet fpc(pc, FeatureKind::component), fpl(pl, FeatureKind::loop);
        TopoDecomposition gt{fgc.features, fgl.features}, pred{fpc.features, fpl.features};
        const auto rep = topology_score(gt, pred, cfg);
        const double comp = oracle::side(gc, pc, cfg), loop = oracle::side(gl, pl, cfg);
        EXPECT_NEAR(rep.component_score, comp, 1e-12);
        EXPECT_NEAR(rep.loop_score, loop, 1e-12);
        EXPECT_NEAR(rep.topology_score, (comp + loop) / 2.0, 1e-12);
    }
}

TEST(ReportJson, SchemaAndRoundTripOfConfig) {
    const auto g = rings(1, 12);
    ScoreConfig cfg;
    cfg.match.radius = 4;
    auto rep = topology_score(g, g, cfg);
    rep.voxel_iou = 0.5;
    const auto j = to_json(rep);
    EXPECT_EQ(j.at("topology_score"), 1.0);
    EXPECT_EQ(j.at("voxel_iou"), 0.5);
    EXPECT_EQ(j.at("counts").at("gt").at("loops"), 1);
    EXPECT_EQ(j.at("matrices").at("loop").at("rows"), 1);
    EXPECT_EQ(j.at("config").at("radius"), 4.0);
    const auto back = score_config_from_json(j.at("config"));
    EXPECT_EQ(back.match.radius, 4.0);
    EXPECT_EQ(back.t_low, kDefaultTLow);

    rep.voxel_iou.reset();
    EXPECT_TRUE(to_json(rep).at("voxel_iou").is_null());

    testutil::TempDir dir("report");
    save_report(rep, dir / "r.json");
    std::ifstream in(dir / "r.json");
    EXPECT_EQ(nlohmann::json::parse(in).at("loop_score"), 1.0);
}
