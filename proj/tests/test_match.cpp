#include <random>

#include <gtest/gtest.h>

#include "toposcore/error.hpp"
#include "toposcore/match.hpp"

using namespace toposcore;

namespace {

MatchCounts brute_force(const std::vector<Point3>& gt, const std::vector<Point3>& pred, double r) {
    auto near = [r](const Point3& q, const std::vector<Point3>& cloud) {
        for (const auto& p : cloud) {
            const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
            if (dx * dx + dy * dy + dz * dz <= r * r) return true;
        }
        return false;
    };
    MatchCounts c;
    for (const auto& q : gt) (near(q, pred) ? c.tp_gt : c.fn) += 1;
    for (const auto& q : pred) (near(q, gt) ? c.tp_p : c.fp) += 1;
    return c;
}

std::vector<Point3> random_cloud(std::mt19937_64& rng, std::size_t n, double extent, bool lattice) {
    std::uniform_real_distribution<double> u(0.0, extent);
    std::uniform_int_distribution<int> k(0, static_cast<int>(extent));
    std::vector<Point3> pts(n);
    for (auto& p : pts) {
        if (lattice) p = {static_cast<double>(k(rng)), static_cast<double>(k(rng)), static_cast<double>(k(rng))};
        else p = {u(rng), u(rng), u(rng)};
    }
    return pts;
}

}  // namespace

TEST(Match, HandExample) {
    const std::vector<Point3> gt{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    const std::vector<Point3> pred{{0, 0, 0}, {1, 0, 0}, {100, 0, 0}};
    const auto c = match_points(gt, pred, {1.5});
    EXPECT_EQ(c, (MatchCounts{3, 2, 1, 0}));
}

TEST(Match, IdenticalAndFarApart) {
    std::mt19937_64 rng(1);
    const auto a = random_cloud(rng, 50, 30, false);
    EXPECT_EQ(match_points(a, a, {0.001}), (MatchCounts{50, 50, 0, 0}));
    auto b = a;
    for (auto& p : b) p.x += 1000;
    EXPECT_EQ(match_points(a, b, {10}), (MatchCounts{0, 0, 50, 50}));
}

TEST(Match, RadiusIsInclusive) {
    const std::vector<Point3> a{{0, 0, 0}};
    const std::vector<Point3> b{{3, 4, 0}};
    EXPECT_EQ(match_points(a, b, {5.0}).tp_gt, 1u);
    EXPECT_EQ(match_points(a, b, {4.999999}).tp_gt, 0u);
}

TEST(Match, RejectsEmptyAndBadRadius) {
    const std::vector<Point3> a{{0, 0, 0}}, none;
    EXPECT_THROW(match_points(a, none, {1}), Error);
    EXPECT_THROW(match_points(a, a, {0}), Error);
    EXPECT_THROW(match_points(a, a, {-1}), Error);
}

TEST(Match, AgreesWithBruteForce) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 300; ++t) {
        const bool lattice = t % 2 == 0;  // lattice points give exact distance ties
        const std::size_t n = 1 + rng() % 1000, m = 1 + rng() % 1000;
        const double extent = lattice ? 20.0 : 200.0;
        const auto a = random_cloud(rng, n, extent, lattice);
        const auto b = random_cloud(rng, m, extent, lattice);
        const double r = lattice ? static_cast<double>(1 + rng() % 5) : 1.0 + static_cast<double>(rng() % 200) / 10.0;
        ASSERT_EQ(match_points(a, b, {r}), brute_force(a, b, r)) << "trial " << t;
    }
}

TEST(Match, SwapSymmetryAndMonotoneRadius) {
    std::mt19937_64 rng(3);
    const auto a = random_cloud(rng, 200, 100, false);
    const auto b = random_cloud(rng, 150, 100, false);
    MatchCounts prev{};
    for (double r = 1; r <= 30; r += 1) {
        const auto ab = match_points(a, b, {r});
        const auto ba = match_points(b, a, {r});
        EXPECT_EQ(ab.tp_gt, ba.tp_p);
        EXPECT_EQ(ab.fn, ba.fp);
        EXPECT_EQ(ab.tp_p, ba.tp_gt);
        EXPECT_EQ(ab.fp, ba.fn);
        if (r > 1) {
            EXPECT_GE(ab.tp_gt, prev.tp_gt);
            EXPECT_GE(ab.tp_p, prev.tp_p);
            EXPECT_LE(ab.fn, prev.fn);
            EXPECT_LE(ab.fp, prev.fp);
        }
        prev = ab;
    }
}

TEST(Match, DuplicatingOneSideDoublesItsCounts) {
    std::mt19937_64 rng(4);
    const auto a = random_cloud(rng, 120, 60, false);
    const auto b = random_cloud(rng, 80, 60, false);
    auto bb = b;
    bb.insert(bb.end(), b.begin(), b.end());
    const auto c1 = match_points(a, b, {6});
    const auto c2 = match_points(a, bb, {6});
    EXPECT_EQ(c2.tp_gt, c1.tp_gt);
    EXPECT_EQ(c2.fn, c1.fn);
    EXPECT_EQ(c2.tp_p, 2 * c1.tp_p);
    EXPECT_EQ(c2.fp, 2 * c1.fp);
}

TEST(PointIndex, CoincidentAndDegenerateClouds) {
    const std::vector<Point3> same(100, Point3{5, 5, 5});
    const PointIndex idx(same, 2.0);
    EXPECT_TRUE(idx.any_within({6, 6, 6}));
    EXPECT_FALSE(idx.any_within({7.1, 5, 5}));
    // a long thin cloud forces the grid to coarsen
    std::vector<Point3> line;
    for (int i = 0; i < 1000; ++i) line.push_back({i * 1000.0, 0, 0});
    const PointIndex far(line, 0.5);
    EXPECT_TRUE(far.any_within({500000.4, 0, 0}));
    EXPECT_FALSE(far.any_within({500000.6, 0, 0}));
    EXPECT_EQ(far.count_matched(line), line.size());
}
