#include "toposcore/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include "toposcore/error.hpp"

namespace toposcore {

namespace {

// Deterministic draws on top of mt19937_64 (the <random> distributions are
// implementation-defined, these are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double symmetric(double a) { return (2.0 * unit() - 1.0) * a; }

private:
    std::mt19937_64 engine_;
};

constexpr std::array<std::array<int, 3>, 6> kSteps{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

constexpr int kJitterAttempts = 64;

double joint_radius(double r) { return r * std::sqrt(2.0) + 0.5; }

double margin_for(const PhantomSpec& s) {
    return std::ceil(joint_radius(s.tube_radius) + s.tube_radius + std::sqrt(3.0) * s.jitter + s.border) + 1.0;
}

int lattice_count(std::size_t width, double margin, double spacing) {
    const double usable = static_cast<double>(width) - 1.0 - 2.0 * margin;
    if (usable < 0) return 0;
    return static_cast<int>(std::floor(usable / spacing)) + 1;
}

struct Layout {
    std::array<std::size_t, 3> cells{1, 1, 1};
    std::size_t capacity = 0;
};

Layout choose_layout(const PhantomSpec& s) {
    const double m = margin_for(s);
    const std::array<std::size_t, 3> dims{s.dims.nx, s.dims.ny, s.dims.nz};
    Layout best;
    const std::size_t n = s.n_components;
    for (std::size_t cx = 1; cx <= n; ++cx)
        for (std::size_t cy = 1; cy <= n; ++cy)
            for (std::size_t cz = 1; cz <= n; ++cz) {
                if (cx * cy * cz < n) continue;
                const std::array<std::size_t, 3> c{cx, cy, cz};
                std::size_t cap = 1;
                for (int a = 0; a < 3; ++a)
                    cap *= static_cast<std::size_t>(lattice_count(dims[a] / c[a], m, s.lattice_spacing));
                const std::size_t cells = cx * cy * cz;
                const std::size_t best_cells = best.cells[0] * best.cells[1] * best.cells[2];
                if (cap > best.capacity || (cap == best.capacity && cap > 0 && cells < best_cells))
                    best = {c, cap};
            }
    return best;
}

std::size_t lattice_slot(const Centerline::Cell& c, const std::array<int, 3>& p) {
    return static_cast<std::size_t>(p[0] + c.extent[0] * (p[1] + c.extent[1] * p[2]));
}

bool inside(const Centerline::Cell& c, const std::array<int, 3>& p) {
    for (int a = 0; a < 3; ++a)
        if (p[a] < 0 || p[a] >= c.extent[a]) return false;
    return true;
}

std::array<int, 3> step(const std::array<int, 3>& p, const std::array<int, 3>& d) {
    return {p[0] + d[0], p[1] + d[1], p[2] + d[2]};
}

bool has_edge(const Centerline& c, NodeId a, NodeId b) {
    return std::any_of(c.edges.begin(), c.edges.end(), [&](const auto& e) {
        return (e.first == a && e.second == b) || (e.first == b && e.second == a);
    });
}

// Node occupying each lattice slot of `cell`, or -1.
std::vector<std::int64_t> occupancy(const Centerline& c, std::uint32_t cell) {
    const auto& ce = c.cells[cell];
    std::vector<std::int64_t> occ(static_cast<std::size_t>(ce.extent[0] * ce.extent[1] * ce.extent[2]), -1);
    for (NodeId i = 0; i < c.lattice.size(); ++i)
        if (c.cell_of[i] == cell) occ[lattice_slot(ce, c.lattice[i])] = i;
    return occ;
}

// Lattice-adjacent waypoint pairs in the same cell that are not yet joined.
std::vector<std::pair<NodeId, NodeId>> chord_candidates(const Centerline& c) {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (std::uint32_t cell = 0; cell < c.cells.size(); ++cell) {
        const auto occ = occupancy(c, cell);
        for (NodeId i = 0; i < c.lattice.size(); ++i) {
            if (c.cell_of[i] != cell) continue;
            for (const auto& d : kSteps) {
                const auto q = step(c.lattice[i], d);
                if (!inside(c.cells[cell], q)) continue;
                const auto j = occ[lattice_slot(c.cells[cell], q)];
                if (j > static_cast<std::int64_t>(i) && !has_edge(c, i, static_cast<NodeId>(j)))
                    out.emplace_back(i, static_cast<NodeId>(j));
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Edges whose removal splits their component.
std::vector<std::size_t> cut_edges(const Centerline& c) {
    const auto base = label_graph_components(c.graph()).second;
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
        auto g = c.graph();
        g.edges.erase(g.edges.begin() + static_cast<std::ptrdiff_t>(e));
        if (label_graph_components(g).second != base) out.push_back(e);
    }
    return out;
}

// Loop edges and loop waypoints on the cycle a chord (a, b) would close, taking
// a shortest path from a to b.
std::pair<std::size_t, std::size_t> loop_overlap(const Centerline& c, const std::vector<bool>& on_loop,
                                                 const std::vector<bool>& loop_node, NodeId a, NodeId b) {
    std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj(c.position.size());
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
        adj[c.edges[e].first].emplace_back(c.edges[e].second, e);
        adj[c.edges[e].second].emplace_back(c.edges[e].first, e);
    }
    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> via(c.position.size(), kNone);
    std::vector<bool> seen(c.position.size(), false);
    std::deque<NodeId> queue{a};
    seen[a] = true;
    while (!queue.empty() && !seen[b]) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (auto [v, e] : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                via[v] = e;
                queue.push_back(v);
            }
    }
    std::size_t edges = 0, nodes = loop_node[a];
    for (NodeId v = b; v != a && via[v] != kNone;) {
        const auto e = via[v];
        edges += on_loop[e];
        nodes += loop_node[v];
        v = c.edges[e].first == v ? c.edges[e].second : c.edges[e].first;
    }
    return {edges, nodes};
}

Point3 lattice_position(const Centerline::Cell& c, const std::array<int, 3>& p, double spacing) {
    return {c.origin[0] + p[0] * spacing, c.origin[1] + p[1] * spacing, c.origin[2] + p[2] * spacing};
}

void check_fits(const Centerline& c, const PhantomSpec& s) {
    const double r = joint_radius(s.tube_radius);
    for (const auto& p : c.position)
        if (p.x - r < 0 || p.y - r < 0 || p.z - r < 0 || p.x + r > static_cast<double>(s.dims.nx - 1) ||
            p.y + r > static_cast<double>(s.dims.ny - 1) || p.z + r > static_cast<double>(s.dims.nz - 1))
            throw Error(Errc::geometry_does_not_fit, "tube leaves the grid");
}

void stamp_capsule(Volume& v, const Point3& a, const Point3& b, double r) {
    const auto& d = v.dims();
    auto data = v.u8_mut();
    const double r2 = r * r;
    auto lo = [&](double p, double q) { return static_cast<std::int64_t>(std::floor(std::min(p, q) - r)); };
    auto hi = [&](double p, double q) { return static_cast<std::int64_t>(std::ceil(std::max(p, q) + r)); };
    const auto clampi = [](std::int64_t x, std::size_t n) {
        return std::clamp<std::int64_t>(x, 0, static_cast<std::int64_t>(n) - 1);
    };
    const double ex = b.x - a.x, ey = b.y - a.y, ez = b.z - a.z;
    const double len2 = ex * ex + ey * ey + ez * ez;
    for (auto z = clampi(lo(a.z, b.z), d.nz); z <= clampi(hi(a.z, b.z), d.nz); ++z)
        for (auto y = clampi(lo(a.y, b.y), d.ny); y <= clampi(hi(a.y, b.y), d.ny); ++y)
            for (auto x = clampi(lo(a.x, b.x), d.nx); x <= clampi(hi(a.x, b.x), d.nx); ++x) {
                const double px = static_cast<double>(x) - a.x, py = static_cast<double>(y) - a.y,
                             pz = static_cast<double>(z) - a.z;
                double t = len2 > 0 ? (px * ex + py * ey + pz * ez) / len2 : 0.0;
                t = std::clamp(t, 0.0, 1.0);
                const double qx = px - t * ex, qy = py - t * ey, qz = pz - t * ez;
                if (qx * qx + qy * qy + qz * qz <= r2)
                    data[d.index(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                                 static_cast<std::size_t>(z))] = 1;
            }
}

}  // namespace

void PhantomSpec::validate() const {
    if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) throw Error(Errc::invalid_argument, "phantom dims must be positive");
    if (n_components < 1) throw Error(Errc::invalid_argument, "phantom needs at least one component");
    if (!loops_per_component.empty() && loops_per_component.size() != n_components)
        throw Error(Errc::invalid_argument, "loops_per_component must list one entry per component");
    if (!(tube_radius > 0)) throw Error(Errc::invalid_argument, "tube radius must be positive");
    if (!(jitter >= 0)) throw Error(Errc::invalid_argument, "jitter must be non-negative");
    if (!(border >= 0)) throw Error(Errc::invalid_argument, "border must be non-negative");
    if (nodes_per_component < 1) throw Error(Errc::invalid_argument, "nodes_per_component must be >= 1");
    // unjoined neighbours keep at least 2 voxels of background between their joints
    if (lattice_spacing - 2.0 * std::sqrt(3.0) * jitter < 2.0 * joint_radius(tube_radius) + 2.0)
        throw Error(Errc::geometry_does_not_fit, "lattice spacing too small for tube radius and jitter");
}

std::vector<std::size_t> distribute_loops(std::size_t total, std::size_t n_components) {
    if (n_components == 0) throw Error(Errc::invalid_argument, "no components to hold loops");
    std::vector<std::size_t> out(n_components, 0);
    for (std::size_t i = 0; i < total; ++i) ++out[i % n_components];
    return out;
}

SkeletonGraph Centerline::graph() const {
    SkeletonGraph g;
    g.nodes = position;
    g.edges = edges;
    return g;
}

PhantomTruth render_phantom(const Centerline& c, const PhantomSpec& spec) {
    check_fits(c, spec);
    PhantomTruth t;
    t.spec = spec;
    t.centerline = c;
    t.volume = Volume::zeros_binary(spec.dims);
    // joints get a ball wide enough to cover the crease between meeting tubes
    std::vector<std::size_t> degree(c.position.size(), 0);
    for (auto [a, b] : c.edges) ++degree[a], ++degree[b];
    for (std::size_t i = 0; i < c.position.size(); ++i)
        stamp_capsule(t.volume, c.position[i], c.position[i],
                      degree[i] > 1 ? joint_radius(spec.tube_radius) : spec.tube_radius);
    for (auto [a, b] : c.edges) stamp_capsule(t.volume, c.position[a], c.position[b], spec.tube_radius);

    auto& g = t.skeleton;
    g.nodes = c.position;
    for (auto [a, b] : c.edges) {
        const auto& pa = c.position[a];
        const auto& pb = c.position[b];
        const double len = std::sqrt((pb.x - pa.x) * (pb.x - pa.x) + (pb.y - pa.y) * (pb.y - pa.y) +
                                     (pb.z - pa.z) * (pb.z - pa.z));
        const auto segments = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len)));
        NodeId prev = a;
        for (std::size_t k = 1; k < segments; ++k) {
            const double f = static_cast<double>(k) / static_cast<double>(segments);
            const auto id = static_cast<NodeId>(g.nodes.size());
            g.nodes.push_back({pa.x + f * (pb.x - pa.x), pa.y + f * (pb.y - pa.y), pa.z + f * (pb.z - pa.z)});
            g.edges.emplace_back(prev, id);
            prev = id;
        }
        g.edges.emplace_back(std::min(prev, b), std::max(prev, b));
    }

    const auto cg = c.graph();
    const auto comps = label_graph_components(cg).second;
    t.counts = {comps, cg.edges.size() + comps - cg.nodes.size()};
    return t;
}

PhantomTruth generate_phantom(const PhantomSpec& spec) {
    spec.validate();
    const auto loops = spec.loops_per_component.empty() ? std::vector<std::size_t>(spec.n_components, 0)
                                                        : spec.loops_per_component;
    const Layout layout = choose_layout(spec);
    if (layout.capacity < spec.nodes_per_component)
        throw Error(Errc::geometry_does_not_fit, "grid too small for the requested components");

    const double m = margin_for(spec);
    const std::array<std::size_t, 3> dims{spec.dims.nx, spec.dims.ny, spec.dims.nz};
    Rng rng(spec.seed);
    Centerline c;

    for (std::size_t comp = 0; comp < spec.n_components; ++comp) {
        // cell comp in x-fastest order of the layout
        const std::array<std::size_t, 3> ci{comp % layout.cells[0], (comp / layout.cells[0]) % layout.cells[1],
                                            comp / (layout.cells[0] * layout.cells[1])};
        Centerline::Cell cell;
        for (int a = 0; a < 3; ++a) {
            const std::size_t lo = ci[a] * dims[a] / layout.cells[a];
            const std::size_t hi = (ci[a] + 1) * dims[a] / layout.cells[a];
            const std::size_t width = hi - lo;
            cell.extent[a] = lattice_count(width, m, spec.lattice_spacing);
            const double used = (cell.extent[a] - 1) * spec.lattice_spacing;
            const double slack = static_cast<double>(width) - 1.0 - 2.0 * m - used;
            cell.origin[a] = static_cast<double>(lo) + m + std::floor(slack / 2.0);
        }
        const auto cell_id = static_cast<std::uint32_t>(c.cells.size());
        c.cells.push_back(cell);

        const std::size_t capacity = static_cast<std::size_t>(cell.extent[0] * cell.extent[1] * cell.extent[2]);
        std::vector<std::int64_t> occ(capacity, -1);
        auto add_node = [&](const std::array<int, 3>& p) {
            const auto id = static_cast<NodeId>(c.lattice.size());
            c.lattice.push_back(p);
            c.cell_of.push_back(cell_id);
            c.position.push_back(lattice_position(cell, p, spec.lattice_spacing));
            occ[lattice_slot(cell, p)] = id;
            return id;
        };

        const std::array<int, 3> start{static_cast<int>(rng.below(static_cast<std::size_t>(cell.extent[0]))),
                                       static_cast<int>(rng.below(static_cast<std::size_t>(cell.extent[1]))),
                                       static_cast<int>(rng.below(static_cast<std::size_t>(cell.extent[2])))};
        std::vector<NodeId> members{add_node(start)};
        std::size_t chords_available = 0;

        // randomized growth of a lattice spanning tree
        while (members.size() < spec.nodes_per_component || chords_available < loops[comp]) {
            std::vector<std::pair<NodeId, std::array<int, 3>>> frontier;
            for (NodeId u : members)
                for (const auto& d : kSteps) {
                    const auto q = step(c.lattice[u], d);
                    if (inside(cell, q) && occ[lattice_slot(cell, q)] < 0) frontier.emplace_back(u, q);
                }
            if (frontier.empty())
                throw Error(Errc::geometry_does_not_fit,
                            "component " + std::to_string(comp) + " cannot hold the requested nodes and loops");
            const auto [parent, q] = frontier[rng.below(frontier.size())];
            const NodeId v = add_node(q);
            c.edges.emplace_back(parent, v);
            members.push_back(v);
            // every other occupied lattice neighbour of v becomes a chord candidate
            for (const auto& d : kSteps) {
                const auto w = step(q, d);
                if (inside(cell, w) && occ[lattice_slot(cell, w)] >= 0 && static_cast<NodeId>(occ[lattice_slot(cell, w)]) != parent)
                    ++chords_available;
            }
        }

        auto candidates = chord_candidates(c);
        std::erase_if(candidates, [&](const auto& e) { return c.cell_of[e.first] != cell_id; });
        for (std::size_t i = candidates.size(); i > 1; --i) std::swap(candidates[i - 1], candidates[rng.below(i)]);
        for (std::size_t k = 0; k < loops[comp]; ++k) c.edges.push_back(candidates[k]);
    }
    for (auto& e : c.edges)
        if (e.first > e.second) std::swap(e.first, e.second);

    // Thin, tilted tubes can rasterize with a pinhole tunnel at a joint; redraw
    // the jitter until the voxels carry exactly the centerline's topology.
    const auto lattice_points = c.position;
    for (int attempt = 0; attempt < kJitterAttempts; ++attempt) {
        for (std::size_t i = 0; i < c.position.size(); ++i) {
            c.position[i] = lattice_points[i];
            c.position[i].x += rng.symmetric(spec.jitter);
            c.position[i].y += rng.symmetric(spec.jitter);
            c.position[i].z += rng.symmetric(spec.jitter);
        }
        auto t = render_phantom(c, spec);
        const auto expected = static_cast<long long>(t.counts.components) - static_cast<long long>(t.counts.loops);
        if (euler_characteristic(t.volume) == expected) return t;
        if (spec.jitter == 0) break;
    }
    throw Error(Errc::geometry_does_not_fit, "tube radius too small to rasterize the centerline faithfully");
}

PhantomTruth corrupt_phantom(const PhantomTruth& truth, const std::vector<Corruption>& ops, std::uint64_t seed) {
    Rng rng(seed);
    Centerline c = truth.centerline;
    const auto& spec = truth.spec;

    for (const auto& op : ops) {
        switch (op.kind) {
            case Corruption::Kind::break_edge: {
                std::vector<std::size_t> balanced;
                for (std::size_t e : cut_edges(c)) {
                    auto g = c.graph();
                    g.edges.erase(g.edges.begin() + static_cast<std::ptrdiff_t>(e));
                    const auto label = label_graph_components(g).first;
                    // both halves keep at least one edge
                    const auto la = label[c.edges[e].first], lb = label[c.edges[e].second];
                    std::size_t ea = 0, eb = 0;
                    for (auto [x, y] : g.edges) {
                        ea += label[x] == la;
                        eb += label[x] == lb;
                        (void)y;
                    }
                    if (ea > 0 && eb > 0) balanced.push_back(e);
                }
                // cutting off a lone waypoint leaves a fragment too small to score
                if (balanced.empty())
                    throw Error(Errc::corruption_impossible, "break_edge: no edge splits a component into two tubes");
                c.edges.erase(c.edges.begin() + static_cast<std::ptrdiff_t>(balanced[rng.below(balanced.size())]));
                break;
            }
            case Corruption::Kind::add_spur: {
                std::vector<std::pair<NodeId, std::array<int, 3>>> slots;
                for (std::uint32_t cell = 0; cell < c.cells.size(); ++cell) {
                    const auto occ = occupancy(c, cell);
                    for (NodeId i = 0; i < c.lattice.size(); ++i) {
                        if (c.cell_of[i] != cell) continue;
                        for (const auto& d : kSteps) {
                            const auto q = step(c.lattice[i], d);
                            if (inside(c.cells[cell], q) && occ[lattice_slot(c.cells[cell], q)] < 0)
                                slots.emplace_back(i, q);
                        }
                    }
                }
                if (slots.empty()) throw Error(Errc::corruption_impossible, "add_spur: no free lattice slot");
                const auto [u, q] = slots[rng.below(slots.size())];
                const auto id = static_cast<NodeId>(c.lattice.size());
                const Point3 pu = c.position[u];
                const std::array<int, 3> lu = c.lattice[u];
                c.lattice.push_back(q);
                c.cell_of.push_back(c.cell_of[u]);
                c.position.push_back({pu.x + (q[0] - lu[0]) * spec.lattice_spacing,
                                      pu.y + (q[1] - lu[1]) * spec.lattice_spacing,
                                      pu.z + (q[2] - lu[2]) * spec.lattice_spacing});
                c.edges.emplace_back(u, id);
                break;
            }
            case Corruption::Kind::add_bridge: {
                const auto candidates = chord_candidates(c);
                if (candidates.empty()) throw Error(Errc::corruption_impossible, "add_bridge: no unjoined neighbours");
                // Only chords whose new cycle runs through tree edges: a chord across
                // or beside an existing loop yields loops that still overlap it.
                // Among those, prefer cycles touching the fewest loop waypoints.
                const auto cuts = cut_edges(c);
                std::vector<bool> on_loop(c.edges.size(), true);
                for (std::size_t e : cuts) on_loop[e] = false;
                std::vector<bool> loop_node(c.position.size(), false);
                for (std::size_t e = 0; e < c.edges.size(); ++e)
                    if (on_loop[e]) loop_node[c.edges[e].first] = loop_node[c.edges[e].second] = true;
                std::vector<std::pair<std::size_t, std::size_t>> overlap(candidates.size());
                for (std::size_t k = 0; k < candidates.size(); ++k)
                    overlap[k] = loop_overlap(c, on_loop, loop_node, candidates[k].first, candidates[k].second);
                const auto fewest = *std::min_element(overlap.begin(), overlap.end());
                if (fewest.first > 0)
                    throw Error(Errc::corruption_impossible, "add_bridge: every chord would share an edge with an existing loop");
                std::vector<std::pair<NodeId, NodeId>> pool;
                for (std::size_t k = 0; k < candidates.size(); ++k)
                    if (overlap[k] == fewest) pool.push_back(candidates[k]);
                c.edges.push_back(pool[rng.below(pool.size())]);
                break;
            }
            case Corruption::Kind::shift: {
                for (auto& p : c.position) {
                    p.x += op.offset[0];
                    p.y += op.offset[1];
                    p.z += op.offset[2];
                }
                break;
            }
        }
    }
    return render_phantom(c, spec);
}

}  // namespace toposcore
