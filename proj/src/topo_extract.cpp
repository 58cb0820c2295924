#include "toposcore/topo_extract.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "toposcore/error.hpp"

namespace toposcore {

std::vector<Point3> TopoFeature::points() const {
    std::vector<Point3> pts;
    pts.reserve(node_ids.size());
    for (NodeId i : node_ids) pts.push_back(owner->nodes[i]);
    return pts;
}

std::vector<TopoFeature> extract_components(const SkeletonGraph& g, std::size_t min_size) {
    if (min_size < 1) throw Error(Errc::invalid_argument, "min component size must be >= 1");
    const auto [label, n] = label_graph_components(g);
    std::vector<std::vector<NodeId>> members(n);
    for (NodeId i = 0; i < label.size(); ++i) members[label[i]].push_back(i);

    std::vector<TopoFeature> out;
    for (auto& m : members)
        if (m.size() >= min_size) out.push_back({FeatureKind::component, std::move(m), &g});
    // members are already sorted, so node_ids.front() is the smallest id
    std::sort(out.begin(), out.end(), [](const TopoFeature& a, const TopoFeature& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.node_ids.front() < b.node_ids.front();
    });
    return out;
}

namespace {

constexpr auto kNoParent = static_cast<NodeId>(-1);

using Edge = std::pair<NodeId, NodeId>;

bool blocked(const std::vector<Edge>& skip, NodeId u, NodeId w) {
    for (auto [a, b] : skip)
        if ((u == a && w == b) || (u == b && w == a)) return true;
    return false;
}

// BFS over `nodes` using `adj`, never crossing an edge listed in `skip`.
// Fills the parent array indexed by global node id (only entries for reached nodes are meaningful).
void bfs(const std::vector<std::vector<NodeId>>& adj, NodeId root, const std::vector<Edge>& skip,
         std::vector<NodeId>& parent, std::vector<char>& seen, const std::vector<NodeId>& nodes, NodeId stop = kNoParent) {
    for (NodeId v : nodes) {
        seen[v] = 0;
        parent[v] = kNoParent;
    }
    std::deque<NodeId> q{root};
    seen[root] = 1;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop_front();
        if (u == stop) return;
        for (NodeId w : adj[u]) {
            if (seen[w] || blocked(skip, u, w)) continue;
            seen[w] = 1;
            parent[w] = u;
            q.push_back(w);
        }
    }
}

std::vector<NodeId> path_to_root(const std::vector<NodeId>& parent, NodeId v) {
    std::vector<NodeId> path{v};
    while (parent[v] != kNoParent) {
        v = parent[v];
        path.push_back(v);
    }
    return path;
}

}  // namespace

std::vector<TopoFeature> extract_loops(const SkeletonGraph& g, const std::vector<TopoFeature>& components) {
    const auto adj = g.adjacency();
    std::vector<NodeId> tree_parent(g.nodes.size(), kNoParent);
    std::vector<NodeId> parent(g.nodes.size(), kNoParent);
    std::vector<char> seen(g.nodes.size(), 0);
    std::vector<std::uint32_t> depth(g.nodes.size(), 0);

    std::vector<TopoFeature> loops;
    for (const auto& comp : components) {
        const auto& nodes = comp.node_ids;
        const NodeId root = nodes.front();
        bfs(adj, root, {}, tree_parent, seen, nodes);
        depth[root] = 0;
        {
            std::deque<NodeId> q{root};
            while (!q.empty()) {
                const NodeId u = q.front();
                q.pop_front();
                for (NodeId w : adj[u])
                    if (tree_parent[w] == u) {
                        depth[w] = depth[u] + 1;
                        q.push_back(w);
                    }
            }
        }

        std::vector<std::pair<NodeId, NodeId>> chords;
        for (NodeId u : nodes)
            for (NodeId w : adj[u])
                if (u < w && tree_parent[w] != u && tree_parent[u] != w) chords.emplace_back(u, w);

        std::set<std::vector<NodeId>> produced;
        for (auto [u, w] : chords) {
            // shortest u-w path avoiding the chord and `skip`, in path order; empty if none
            auto shortest_cycle = [&](std::vector<Edge> skip) {
                skip.emplace_back(u, w);
                bfs(adj, u, skip, parent, seen, nodes, w);
                return seen[w] ? path_to_root(parent, w) : std::vector<NodeId>{};
            };
            const auto path = shortest_cycle({});
            std::vector<NodeId> cycle = path;
            std::sort(cycle.begin(), cycle.end());

            if (produced.contains(cycle)) {
                // the shortest cycle that also avoids one edge of the duplicate
                std::vector<NodeId> best;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                    auto alt = shortest_cycle({{path[i], path[i + 1]}});
                    if (alt.empty() || (!best.empty() && alt.size() >= best.size())) continue;
                    std::sort(alt.begin(), alt.end());
                    if (!produced.contains(alt)) best = std::move(alt);
                }
                cycle = std::move(best);
            }
            if (cycle.empty()) {
                // fundamental cycle: tree paths from both ends up to their meeting point
                std::vector<NodeId> a{u}, b{w};
                NodeId x = u, y = w;
                while (x != y) {
                    if (depth[x] >= depth[y]) a.push_back(x = tree_parent[x]);
                    else b.push_back(y = tree_parent[y]);
                }
                cycle = a;
                cycle.insert(cycle.end(), b.begin(), b.end());
                std::sort(cycle.begin(), cycle.end());
                cycle.erase(std::unique(cycle.begin(), cycle.end()), cycle.end());
            }
            produced.insert(cycle);
            loops.push_back({FeatureKind::loop, std::move(cycle), &g});
        }
    }
    return loops;
}

TopoDecomposition decompose(const SkeletonGraph& g, std::size_t min_size) {
    TopoDecomposition d;
    d.components = extract_components(g, min_size);
    d.loops = extract_loops(g, d.components);
    return d;
}

}  // namespace toposcore
