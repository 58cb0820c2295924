#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "toposcore/skeleton.hpp"
#include "toposcore/topo_extract.hpp"

namespace toposcore {

inline constexpr double kDefaultRadius = 10.0;

struct MatchConfig {
    double radius = kDefaultRadius;  // metric units, > 0
    void validate() const;
};

/// Node-level agreement between one GT feature and one predicted feature.
struct MatchCounts {
    std::uint64_t tp_gt = 0;  // GT nodes with a predicted node within r
    std::uint64_t tp_p = 0;   // predicted nodes with a GT node within r
    std::uint64_t fp = 0;     // predicted nodes without a GT node within r
    std::uint64_t fn = 0;     // GT nodes without a predicted node within r

    friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

/// Exact fixed-radius queries over a point cloud: a uniform grid with cells
/// of edge `radius`, points stored per cell as contiguous x/y/z runs so each
/// cell is scanned by the vector distance kernel.
class PointIndex {
public:
    PointIndex(std::span<const Point3> points, double radius);

    double radius() const noexcept { return radius_; }
    std::size_t size() const noexcept { return xs_.size(); }

    /// Is any indexed point within `radius` (inclusive) of q?
    bool any_within(const Point3& q) const;

    /// Number of `queries` that have an indexed point within `radius`.
    std::uint64_t count_matched(std::span<const Point3> queries) const;

    Point3 lo() const noexcept { return lo_; }
    Point3 hi() const noexcept { return hi_; }

private:
    double radius_;
    double r2_;
    double cell_;
    Point3 lo_{}, hi_{};
    std::int64_t gx_ = 0, gy_ = 0, gz_ = 0;
    std::vector<std::uint32_t> cell_start_;  // CSR over cells, size gx*gy*gz + 1
    std::vector<double> xs_, ys_, zs_;
};

/// Many-to-one nearest-node matching of feature `gt` against feature `pred`.
/// Throws empty_feature if either side has no nodes.
MatchCounts match_features(const TopoFeature& gt, const TopoFeature& pred, const MatchConfig& cfg);

/// Same, on raw point clouds.
MatchCounts match_points(std::span<const Point3> gt, std::span<const Point3> pred, const MatchConfig& cfg);

/// Counts from prebuilt indexes (each built with cfg.radius over the cloud it indexes).
MatchCounts match_indexed(std::span<const Point3> gt, const PointIndex& gt_index, std::span<const Point3> pred,
                          const PointIndex& pred_index);

}  // namespace toposcore
