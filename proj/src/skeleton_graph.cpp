#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include <nlohmann/json.hpp>

#include "toposcore/error.hpp"
#include "toposcore/skeleton.hpp"

namespace toposcore {

using nlohmann::json;

void SkeletonGraph::validate() const {
    for (const auto& p : nodes)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw Error(Errc::out_of_range, "skeleton node coordinate is not finite");
    auto sorted = edges;
    for (auto& [a, b] : sorted) {
        if (a >= nodes.size() || b >= nodes.size())
            throw Error(Errc::dangling_index, "edge [" + std::to_string(a) + "," + std::to_string(b) + "] with " +
                                                  std::to_string(nodes.size()) + " nodes");
        if (a == b) throw Error(Errc::self_edge, "self edge on node " + std::to_string(a));
        if (a > b) std::swap(a, b);
    }
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(Errc::duplicate_edge, "duplicate edge in skeleton");
}

std::vector<std::vector<NodeId>> SkeletonGraph::adjacency() const {
    std::vector<std::vector<NodeId>> adj(nodes.size());
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& l : adj) std::sort(l.begin(), l.end());
    return adj;
}

std::pair<std::vector<std::uint32_t>, std::size_t> label_graph_components(const SkeletonGraph& g) {
    // union-find; labels renumbered by smallest member
    std::vector<NodeId> parent(g.nodes.size());
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [a, b] : g.edges) {
        const NodeId ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    constexpr auto kUnset = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> root_label(g.nodes.size(), kUnset);
    std::vector<std::uint32_t> label(g.nodes.size());
    std::size_t n = 0;
    for (NodeId i = 0; i < g.nodes.size(); ++i) {
        const NodeId r = find(i);
        if (root_label[r] == kUnset) root_label[r] = static_cast<std::uint32_t>(n++);
        label[i] = root_label[r];
    }
    return {std::move(label), n};
}

std::size_t cycle_rank(const SkeletonGraph& g) {
    const auto comps = label_graph_components(g).second;
    return g.edges.size() + comps - g.nodes.size();
}

SkeletonGraph load_skeleton(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(Errc::malformed_skeleton, path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array() || !j.contains("edges") ||
        !j["edges"].is_array())
        throw Error(Errc::malformed_skeleton, "skeleton JSON needs \"nodes\" and \"edges\" arrays");

    SkeletonGraph g;
    g.nodes.reserve(j["nodes"].size());
    for (const auto& p : j["nodes"]) {
        if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
            throw Error(Errc::malformed_skeleton, "node must be [x, y, z]");
        g.nodes.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    g.edges.reserve(j["edges"].size());
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw Error(Errc::malformed_skeleton, "edge must be [i, j]");
        const auto a = e[0].get<long long>(), b = e[1].get<long long>();
        if (a < 0 || b < 0 || static_cast<unsigned long long>(std::max(a, b)) >= g.nodes.size())
            throw Error(Errc::dangling_index, "edge [" + std::to_string(a) + "," + std::to_string(b) + "] with " +
                                                  std::to_string(g.nodes.size()) + " nodes");
        const auto u = static_cast<NodeId>(a), v = static_cast<NodeId>(b);
        g.edges.emplace_back(u, v);
    }
    g.validate();
    return g;
}

void save_skeleton(const SkeletonGraph& g, const std::filesystem::path& path) {
    json nodes = json::array();
    for (const auto& p : g.nodes) nodes.push_back({p.x, p.y, p.z});
    json edges = json::array();
    for (auto [a, b] : g.edges) edges.push_back({a, b});
    const json j{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot open for writing: " + path.string());
    out << j.dump() << '\n';
    if (!out) throw Error(Errc::io, "write failed: " + path.string());
}

}  // namespace toposcore
