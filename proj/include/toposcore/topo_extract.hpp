#pragma once

#include <cstddef>
#include <vector>

#include "toposcore/skeleton.hpp"

namespace toposcore {

enum class FeatureKind { component, loop };

/// One component or one loop of a skeleton, as a sorted set of node indices
/// into `owner`. The owner must outlive the feature.
struct TopoFeature {
    FeatureKind kind = FeatureKind::component;
    std::vector<NodeId> node_ids;
    const SkeletonGraph* owner = nullptr;

    std::size_t size() const noexcept { return node_ids.size(); }
    std::vector<Point3> points() const;
};

struct TopoDecomposition {
    std::vector<TopoFeature> components;
    std::vector<TopoFeature> loops;

    std::size_t num_components() const noexcept { return components.size(); }
    std::size_t num_loops() const noexcept { return loops.size(); }
};

/// Connected components with at least `min_size` nodes, largest first, ties
/// broken by smallest node id.
std::vector<TopoFeature> extract_components(const SkeletonGraph& g, std::size_t min_size);

/// E' - V' + 1 loops per component. A breadth-first spanning tree rooted at the
/// component's smallest node leaves one chord per independent cycle; each chord
/// is turned into the shortest cycle through it (BFS in the component minus the
/// chord). If that node set was already produced for the component, the
/// shortest new cycle that also avoids one edge of the duplicate is taken, and
/// failing that the chord's fundamental cycle, so the count is never reduced.
std::vector<TopoFeature> extract_loops(const SkeletonGraph& g, const std::vector<TopoFeature>& components);

TopoDecomposition decompose(const SkeletonGraph& g, std::size_t min_size);
// Features point into the graph, so it must outlive the decomposition.
TopoDecomposition decompose(SkeletonGraph&&, std::size_t) = delete;
std::vector<TopoFeature> extract_components(SkeletonGraph&&, std::size_t) = delete;

}  // namespace toposcore
