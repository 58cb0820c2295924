#include "toposcore/match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toposcore/error.hpp"
#include "toposcore/kernels.hpp"

namespace toposcore {

void MatchConfig::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw Error(Errc::invalid_argument, "matching radius must be a positive finite number");
}

namespace {

// Cap on grid cells relative to the point count; sparse clouds get coarser cells.
constexpr double kCellsPerPoint = 8.0;

}  // namespace

PointIndex::PointIndex(std::span<const Point3> points, double radius)
    : radius_(radius), r2_(radius * radius), cell_(radius) {
    MatchConfig{radius}.validate();
    if (points.empty()) {
        cell_start_.assign(1, 0);
        return;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    lo_ = {inf, inf, inf};
    hi_ = {-inf, -inf, -inf};
    for (const auto& p : points) {
        lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y), std::min(lo_.z, p.z)};
        hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y), std::max(hi_.z, p.z)};
    }
    auto extent_cells = [&](double c) {
        return (std::floor((hi_.x - lo_.x) / c) + 1) * (std::floor((hi_.y - lo_.y) / c) + 1) *
               (std::floor((hi_.z - lo_.z) / c) + 1);
    };
    const double budget = std::max(64.0, kCellsPerPoint * static_cast<double>(points.size()));
    while (extent_cells(cell_) > budget) cell_ *= 2.0;

    gx_ = static_cast<std::int64_t>(std::floor((hi_.x - lo_.x) / cell_)) + 1;
    gy_ = static_cast<std::int64_t>(std::floor((hi_.y - lo_.y) / cell_)) + 1;
    gz_ = static_cast<std::int64_t>(std::floor((hi_.z - lo_.z) / cell_)) + 1;

    auto cell_of = [&](const Point3& p) {
        const auto cx = std::min(gx_ - 1, static_cast<std::int64_t>((p.x - lo_.x) / cell_));
        const auto cy = std::min(gy_ - 1, static_cast<std::int64_t>((p.y - lo_.y) / cell_));
        const auto cz = std::min(gz_ - 1, static_cast<std::int64_t>((p.z - lo_.z) / cell_));
        return static_cast<std::size_t>(cx + gx_ * (cy + gy_ * cz));
    };

    const auto ncells = static_cast<std::size_t>(gx_ * gy_ * gz_);
    cell_start_.assign(ncells + 1, 0);
    std::vector<std::size_t> cell_ids(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        cell_ids[i] = cell_of(points[i]);
        ++cell_start_[cell_ids[i] + 1];
    }
    for (std::size_t c = 0; c < ncells; ++c) cell_start_[c + 1] += cell_start_[c];

    xs_.resize(points.size());
    ys_.resize(points.size());
    zs_.resize(points.size());
    std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto slot = fill[cell_ids[i]]++;
        xs_[slot] = points[i].x;
        ys_[slot] = points[i].y;
        zs_[slot] = points[i].z;
    }
}

bool PointIndex::any_within(const Point3& q) const {
    if (xs_.empty()) return false;
    auto range = [&](double v, double lo, std::int64_t g, std::int64_t& a, std::int64_t& b) {
        // the pad only widens the scanned cells; the distance test stays exact
        const double pad = radius_ + 1e-9 * (1.0 + std::abs(v));
        const double fa = std::floor((v - pad - lo) / cell_);
        const double fb = std::floor((v + pad - lo) / cell_);
        if (fb < 0 || fa > static_cast<double>(g - 1)) return false;
        a = std::max<std::int64_t>(0, static_cast<std::int64_t>(fa));
        b = std::min<std::int64_t>(g - 1, static_cast<std::int64_t>(fb));
        return true;
    };
    std::int64_t x0, x1, y0, y1, z0, z1;
    if (!range(q.x, lo_.x, gx_, x0, x1) || !range(q.y, lo_.y, gy_, y0, y1) || !range(q.z, lo_.z, gz_, z0, z1))
        return false;

    const auto& k = simd::kernels();
    for (auto cz = z0; cz <= z1; ++cz)
        for (auto cy = y0; cy <= y1; ++cy) {
            // cells along x are contiguous in the CSR layout
            const auto row = gx_ * (cy + gy_ * cz);
            const auto begin = cell_start_[static_cast<std::size_t>(row + x0)];
            const auto end = cell_start_[static_cast<std::size_t>(row + x1 + 1)];
            if (begin != end && k.any_within(xs_.data() + begin, ys_.data() + begin, zs_.data() + begin,
                                             end - begin, q.x, q.y, q.z, r2_))
                return true;
        }
    return false;
}

std::uint64_t PointIndex::count_matched(std::span<const Point3> queries) const {
    std::uint64_t n = 0;
    for (const auto& q : queries) n += any_within(q) ? 1 : 0;
    return n;
}

MatchCounts match_indexed(std::span<const Point3> gt, const PointIndex& gt_index, std::span<const Point3> pred,
                          const PointIndex& pred_index) {
    if (gt.empty() || pred.empty()) throw Error(Errc::empty_feature, "cannot match an empty feature");
    MatchCounts c;
    c.tp_gt = pred_index.count_matched(gt);
    c.fn = gt.size() - c.tp_gt;
    c.tp_p = gt_index.count_matched(pred);
    c.fp = pred.size() - c.tp_p;
    return c;
}

MatchCounts match_points(std::span<const Point3> gt, std::span<const Point3> pred, const MatchConfig& cfg) {
    cfg.validate();
    if (gt.empty() || pred.empty()) throw Error(Errc::empty_feature, "cannot match an empty feature");
    return match_indexed(gt, PointIndex(gt, cfg.radius), pred, PointIndex(pred, cfg.radius));
}

MatchCounts match_features(const TopoFeature& gt, const TopoFeature& pred, const MatchConfig& cfg) {
    const auto a = gt.points();
    const auto b = pred.points();
    return match_points(a, b, cfg);
}

}  // namespace toposcore
