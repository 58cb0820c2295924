#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "toposcore/volume.hpp"

namespace toposcore {

using NodeId = std::uint32_t;

struct Point3 {
    double x = 0, y = 0, z = 0;
    friend bool operator==(const Point3&, const Point3&) = default;
};

/// Geometric skeleton graph: node coordinates in metric units plus undirected
/// edges (unordered index pairs).
struct SkeletonGraph {
    std::vector<Point3> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t edge_count() const noexcept { return edges.size(); }

    /// Throws dangling_index / self_edge / duplicate_edge / out_of_range.
    void validate() const;

    /// Sorted neighbour lists.
    std::vector<std::vector<NodeId>> adjacency() const;

    friend bool operator==(const SkeletonGraph&, const SkeletonGraph&) = default;
};

/// Component id per node (ids in order of smallest member) and the number of components.
std::pair<std::vector<std::uint32_t>, std::size_t> label_graph_components(const SkeletonGraph& g);

/// E - V + C.
std::size_t cycle_rank(const SkeletonGraph& g);

/// Bitmask over the 3x3x3 neighbourhood; bit (dx+1) + 3(dy+1) + 9(dz+1).
using Neighborhood = std::uint32_t;

/// Simple-point test for 26-connected foreground / 6-connected background:
/// exactly one foreground 26-component among the 26 neighbours and exactly one
/// background 6-component in the 18-neighbourhood touching the centre.
bool is_simple(Neighborhood n) noexcept;

Neighborhood neighborhood_at(const Volume& v, std::size_t x, std::size_t y, std::size_t z);

/// Euler characteristic of the 26-connected foreground, i.e. components minus
/// tunnels plus cavities, from the complex of closed unit cubes.
long long euler_characteristic(const Volume& v);

/// Curve thinning by directional sub-iterations. Deletes simple voxels that
/// are not curve end points (voxels with a single 26-neighbour), re-checking
/// each candidate sequentially in raster order, until a full pass over all six
/// directions removes nothing. Deterministic.
Volume thin_volume(const Volume& v);

/// One node per foreground voxel (raster order, coordinates scaled by spacing)
/// and one edge per 26-adjacent pair.
SkeletonGraph graph_from_skeleton_voxels(const Volume& v);

/// Removes edges that close a triangle, longest first (ties: larger endpoint
/// pair first), until the graph has no 3-cycles. Three mutually adjacent
/// voxels cannot enclose a tunnel, so this changes the cycle rank without
/// changing connectivity. Node ids are kept.
SkeletonGraph break_triangles(SkeletonGraph g);

/// Merges every 26-connected cluster of junction nodes (degree > 2) into a
/// single node at the cluster centroid. Other nodes keep their relative order;
/// parallel edges collapse to one.
SkeletonGraph contract_junctions(const SkeletonGraph& g);

/// thin_volume, graph_from_skeleton_voxels, contract_junctions, then break_triangles.
SkeletonGraph skeletonize(const Volume& v);

SkeletonGraph load_skeleton(const std::filesystem::path& path);
void save_skeleton(const SkeletonGraph& g, const std::filesystem::path& path);

}  // namespace toposcore
