#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_util.hpp"
#include "toposcore/error.hpp"
#include "toposcore/phantom.hpp"
#include "toposcore/select.hpp"

using namespace toposcore;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Volume to_probability(const Volume& mask, float on, float off) {
    std::vector<float> p(mask.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = mask.u8()[i] ? on : off;
    return Volume::real(mask.dims(), p, mask.spacing());
}

PhantomTruth small_phantom(std::uint64_t seed) {
    PhantomSpec s;
    s.seed = seed;
    s.dims = {48, 48, 48};
    s.n_components = 1;
    s.loops_per_component = {1};
    s.nodes_per_component = 4;
    return generate_phantom(s);
}

}  // namespace

TEST(Sweep, DefaultGrid) {
    const auto t = default_thresholds();
    ASSERT_EQ(t.size(), 9u);
    EXPECT_EQ(t.front(), 0.1);
    EXPECT_EQ(t.back(), 0.9);
    EXPECT_EQ(parse_metric("voxel_iou"), SweepMetric::voxel_iou);
    EXPECT_THROW(parse_metric("dice"), Error);
}

TEST(Sweep, SpecValidation) {
    SweepSpec s;
    EXPECT_THROW(s.validate(), Error);  // empty dataset
    s.dataset.push_back({"a", "p.json", "g.json"});
    EXPECT_NO_THROW(s.validate());
    s.thresholds = {0.5, 0.5};
    EXPECT_THROW(s.validate(), Error);
    s.thresholds = {0.0, 0.5};
    EXPECT_THROW(s.validate(), Error);
    s.thresholds = {0.5};
    s.dataset[0].name = "a,b";
    EXPECT_THROW(s.validate(), Error);
}

TEST(Sweep, MaskAsProbabilityMapIsPerfectEverywhere) {
    testutil::TempDir dir("sweep");
    const auto t = small_phantom(1);
    save_volume(t.volume, dir / "gt.json");
    save_volume(to_probability(t.volume, 1.0f, 0.0f), dir / "prob.json");
    SweepSpec s;
    s.dataset.push_back({"item", dir / "prob.json", dir / "gt.json"});
    const auto r = run_sweep(s);
    ASSERT_EQ(r.rows.size(), 9u);
    for (const auto& row : r.rows) {
        EXPECT_EQ(*row.voxel_iou, 1.0);
        EXPECT_EQ(row.topo_score, 1.0);
        EXPECT_EQ(row.entropy, 0.0);
    }
    EXPECT_EQ(*r.best_voxel_iou, 0.1);
    EXPECT_EQ(*r.best_topology, 0.1);
}

TEST(Sweep, SkeletonGroundTruthHasNoVoxelIou) {
    testutil::TempDir dir("sweep");
    const auto t = small_phantom(2);
    save_skeleton(t.skeleton, dir / "gt_skel.json");
    save_volume(to_probability(t.volume, 0.8f, 0.1f), dir / "prob.json");
    SweepSpec s;
    s.thresholds = {0.05, 0.5, 0.95};
    s.dataset.push_back({"item", dir / "prob.json", dir / "gt_skel.json"});
    const auto r = run_sweep(s);
    ASSERT_EQ(r.rows.size(), 3u);
    for (const auto& row : r.rows) EXPECT_FALSE(row.voxel_iou.has_value());
    EXPECT_FALSE(r.best_voxel_iou.has_value());
    EXPECT_EQ(r.rows[1].topo_score, 1.0);
    EXPECT_LT(r.rows[2].topo_score, 1.0);  // empty prediction
    EXPECT_EQ(*r.best_topology, 0.5);
}

TEST(Sweep, UnreadableItemIsSkipped) {
    testutil::TempDir dir("sweep");
    const auto t = small_phantom(3);
    save_volume(t.volume, dir / "gt.json");
    save_volume(to_probability(t.volume, 0.9f, 0.0f), dir / "prob.json");
    SweepSpec s;
    s.thresholds = {0.5};
    s.dataset.push_back({"good", dir / "prob.json", dir / "gt.json"});
    s.dataset.push_back({"bad", dir / "missing.json", dir / "gt.json"});
    const auto r = run_sweep(s);
    ASSERT_EQ(r.skipped.size(), 1u);
    EXPECT_EQ(r.skipped[0].item, "bad");
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.summary[0].topo_score.n, 1u);
}

TEST(Sweep, ReportRowsAggregatesAndDeterminism) {
    testutil::TempDir dir("sweep");
    for (int i = 0; i < 2; ++i) {
        const auto t = small_phantom(10 + static_cast<std::uint64_t>(i));
        save_volume(t.volume, dir / ("gt" + std::to_string(i) + ".json"));
        save_volume(to_probability(t.volume, 0.75f, 0.25f), dir / ("prob" + std::to_string(i) + ".json"));
    }
    std::ofstream(dir / "manifest.json") << R"({
      "thresholds": [0.2, 0.5, 0.8],
      "metric": "both",
      "config": {"radius": 8},
      "items": [{"name": "a", "prob": "prob0.json", "gt": "gt0.json"},
                {"name": "b", "prob": "prob1.json", "gt": "gt1.json"}]
    })";
    const auto spec = load_sweep_manifest(dir / "manifest.json");
    EXPECT_EQ(spec.cfg.match.radius, 8.0);
    const auto r = run_sweep(spec);
    emit_report(r, dir / "out");
    const auto csv = slurp(dir / "out.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "item,threshold,voxel_iou,topo_score,loop_score,component_score,entropy");

    // entropy column is the mean entropy of each probability map
    const double h = mean_entropy(load_volume(dir / "prob0.json"));
    EXPECT_EQ(r.rows[0].entropy, h);

    // aggregates recomputed from the rows
    const auto j = nlohmann::json::parse(slurp(dir / "out.json"));
    for (std::size_t k = 0; k < 3; ++k) {
        double sum = 0, sq = 0;
        std::vector<double> xs;
        for (const auto& row : j.at("rows"))
            if (row.at("threshold").get<double>() == spec.thresholds[k]) xs.push_back(row.at("topo_score").get<double>());
        ASSERT_EQ(xs.size(), 2u);
        for (double x : xs) sum += x;
        const double mean = sum / 2.0;
        for (double x : xs) sq += (x - mean) * (x - mean);
        const auto& agg = j.at("summary")[k].at("topo_score");
        EXPECT_DOUBLE_EQ(agg.at("mean").get<double>(), mean);
        EXPECT_DOUBLE_EQ(agg.at("std").get<double>(), std::sqrt(sq / 2.0));
    }
    // 0.5 splits the two levels cleanly; 0.2 keeps everything, 0.8 nothing
    EXPECT_EQ(*r.best_voxel_iou, 0.5);
    EXPECT_EQ(*r.best_topology, 0.5);

    emit_report(run_sweep(spec), dir / "again.csv");
    EXPECT_EQ(slurp(dir / "out.csv"), slurp(dir / "again.csv"));
    EXPECT_EQ(slurp(dir / "out.json"), slurp(dir / "again.json"));
}

TEST(Inputs, DetectsKind) {
    testutil::TempDir dir("inputs");
    const auto t = small_phantom(4);
    save_volume(t.volume, dir / "v.json");
    save_skeleton(t.skeleton, dir / "s.json");
    EXPECT_EQ(detect_input_kind(dir / "v.json"), InputKind::volume);
    EXPECT_EQ(detect_input_kind(dir / "s.json"), InputKind::skeleton);
    std::ofstream(dir / "x.json") << R"({"foo": 1})";
    EXPECT_THROW(detect_input_kind(dir / "x.json"), Error);
    const auto in = load_skeleton_input(dir / "v.json");
    ASSERT_TRUE(in.volume.has_value());
    EXPECT_EQ(cycle_rank(in.skeleton), 1u);
}
