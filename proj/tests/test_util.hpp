#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <string>

#include "toposcore/skeleton.hpp"

namespace testutil {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("toposcore-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Path graph along x starting at (x0, y0, z0) with unit spacing.
inline toposcore::SkeletonGraph path_graph(std::size_t n, double x0 = 0, double y0 = 0, double z0 = 0) {
    toposcore::SkeletonGraph g;
    for (std::size_t i = 0; i < n; ++i) g.nodes.push_back({x0 + static_cast<double>(i), y0, z0});
    for (std::size_t i = 1; i < n; ++i) g.edges.emplace_back(static_cast<toposcore::NodeId>(i - 1), static_cast<toposcore::NodeId>(i));
    return g;
}

// Cycle of n nodes on a circle of the given radius.
inline toposcore::SkeletonGraph ring_graph(std::size_t n, double radius, double cx = 0, double cy = 0, double cz = 0) {
    toposcore::SkeletonGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * static_cast<double>(i) / static_cast<double>(n);
        g.nodes.push_back({cx + radius * std::cos(a), cy + radius * std::sin(a), cz});
    }
    for (std::size_t i = 0; i < n; ++i)
        g.edges.emplace_back(static_cast<toposcore::NodeId>(i), static_cast<toposcore::NodeId>((i + 1) % n));
    return g;
}

// Appends `b` to `a`, shifting b's node ids.
inline void append_graph(toposcore::SkeletonGraph& a, const toposcore::SkeletonGraph& b) {
    const auto off = static_cast<toposcore::NodeId>(a.nodes.size());
    a.nodes.insert(a.nodes.end(), b.nodes.begin(), b.nodes.end());
    for (auto [u, v] : b.edges) a.edges.emplace_back(u + off, v + off);
}

// Random simple graph: uniformly placed nodes, about 4n/3 random edges.
inline toposcore::SkeletonGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes, double extent) {
    toposcore::SkeletonGraph g;
    std::uniform_real_distribution<double> pos(0.0, extent);
    std::uniform_int_distribution<std::size_t> count(1, max_nodes);
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) g.nodes.push_back({pos(rng), pos(rng), pos(rng)});
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::set<std::pair<toposcore::NodeId, toposcore::NodeId>> seen;
    const std::size_t m = n + n / 3;
    for (std::size_t k = 0; k < m; ++k) {
        auto a = static_cast<toposcore::NodeId>(pick(rng)), b = static_cast<toposcore::NodeId>(pick(rng));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (seen.insert({a, b}).second) g.edges.emplace_back(a, b);
    }
    return g;
}

}  // namespace testutil
