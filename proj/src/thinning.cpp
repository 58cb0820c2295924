#include <algorithm>
#include <array>
#include <bit>

#include "toposcore/error.hpp"
#include "toposcore/skeleton.hpp"

namespace toposcore {
namespace {

constexpr int kCentre = 13;

constexpr int pos(int dx, int dy, int dz) { return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1); }

struct NeighborTables {
    // 26-adjacency between the 26 non-centre cells of the cube
    std::array<std::uint32_t, 27> adj26{};
    // 6-adjacency restricted to the 18-neighbourhood
    std::array<std::uint32_t, 27> adj6{};
    std::uint32_t n18_mask = 0;
    std::uint32_t n6_mask = 0;
};

constexpr NeighborTables make_tables() {
    NeighborTables t;
    auto coord = [](int i, int& x, int& y, int& z) {
        x = i % 3 - 1;
        y = (i / 3) % 3 - 1;
        z = i / 9 - 1;
    };
    for (int i = 0; i < 27; ++i) {
        if (i == kCentre) continue;
        int xi, yi, zi;
        coord(i, xi, yi, zi);
        const int li = (xi != 0) + (yi != 0) + (zi != 0);
        if (li <= 2) t.n18_mask |= 1u << i;
        if (li == 1) t.n6_mask |= 1u << i;
        for (int j = 0; j < 27; ++j) {
            if (j == i || j == kCentre) continue;
            int xj, yj, zj;
            coord(j, xj, yj, zj);
            const int ax = xi > xj ? xi - xj : xj - xi;
            const int ay = yi > yj ? yi - yj : yj - yi;
            const int az = zi > zj ? zi - zj : zj - zi;
            if (ax <= 1 && ay <= 1 && az <= 1) t.adj26[i] |= 1u << j;
            if (ax + ay + az == 1) t.adj6[i] |= 1u << j;
        }
    }
    return t;
}

constexpr NeighborTables kTables = make_tables();

// Flood fill inside a 27-bit set; returns the cells reached from `seed`.
template <typename Adj>
std::uint32_t flood(std::uint32_t set, int seed, const Adj& adj) {
    std::uint32_t reached = 1u << seed;
    std::uint32_t frontier = reached;
    while (frontier) {
        const int i = std::countr_zero(frontier);
        frontier &= frontier - 1;
        const std::uint32_t next = adj[static_cast<std::size_t>(i)] & set & ~reached;
        reached |= next;
        frontier |= next;
    }
    return reached;
}

// Sub-iteration order: -z, +z, -y, +y, -x, +x.
constexpr std::array<std::array<int, 3>, 6> kDirections{{
    {0, 0, -1}, {0, 0, 1}, {0, -1, 0}, {0, 1, 0}, {-1, 0, 0}, {1, 0, 0},
}};

// Zero-padded copy so every foreground voxel has a full neighbourhood.
struct Padded {
    std::size_t px, py, pz;
    std::vector<std::uint8_t> cells;
    std::array<std::ptrdiff_t, 27> offsets{};

    explicit Padded(const Volume& v) {
        const auto& d = v.dims();
        px = d.nx + 2;
        py = d.ny + 2;
        pz = d.nz + 2;
        cells.assign(px * py * pz, 0);
        const auto src = v.u8();
        for (std::size_t z = 0; z < d.nz; ++z)
            for (std::size_t y = 0; y < d.ny; ++y)
                std::copy_n(src.data() + d.index(0, y, z), d.nx, cells.data() + index(1, y + 1, z + 1));
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    offsets[static_cast<std::size_t>(pos(dx, dy, dz))] =
                        dx + static_cast<std::ptrdiff_t>(px) * (dy + static_cast<std::ptrdiff_t>(py) * dz);
    }

    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const { return x + px * (y + py * z); }

    Neighborhood neighborhood(std::size_t i) const {
        Neighborhood n = 0;
        for (int k = 0; k < 27; ++k)
            if (cells[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + offsets[static_cast<std::size_t>(k)])])
                n |= 1u << k;
        return n;
    }
};

bool deletable(Neighborhood n) {
    const int neighbours = std::popcount(n & ~(1u << kCentre));
    return neighbours > 1 && is_simple(n);
}

}  // namespace

bool is_simple(Neighborhood n) noexcept {
    const std::uint32_t fg = n & ~(1u << kCentre) & ((1u << 27) - 1);
    if (fg == 0) return false;
    if (flood(fg, std::countr_zero(fg), kTables.adj26) != fg) return false;

    const std::uint32_t bg = ~n & kTables.n18_mask;
    std::uint32_t faces = bg & kTables.n6_mask;
    if (faces == 0) return false;
    const std::uint32_t comp = flood(bg, std::countr_zero(faces), kTables.adj6);
    faces &= ~comp;
    return faces == 0;
}

Neighborhood neighborhood_at(const Volume& v, std::size_t x, std::size_t y, std::size_t z) {
    const auto& d = v.dims();
    const auto data = v.u8();
    Neighborhood n = 0;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const auto xx = static_cast<std::ptrdiff_t>(x) + dx;
                const auto yy = static_cast<std::ptrdiff_t>(y) + dy;
                const auto zz = static_cast<std::ptrdiff_t>(z) + dz;
                if (xx < 0 || yy < 0 || zz < 0 || xx >= static_cast<std::ptrdiff_t>(d.nx) ||
                    yy >= static_cast<std::ptrdiff_t>(d.ny) || zz >= static_cast<std::ptrdiff_t>(d.nz))
                    continue;
                if (data[d.index(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy),
                                 static_cast<std::size_t>(zz))])
                    n |= 1u << pos(dx, dy, dz);
            }
    return n;
}

long long euler_characteristic(const Volume& v) {
    // corners, edges and faces of the padded grid are present when any voxel
    // containing them is foreground
    const Padded pad(v);
    const auto& c = pad.cells;
    const std::ptrdiff_t sx = 1, sy = static_cast<std::ptrdiff_t>(pad.px), sz = sy * static_cast<std::ptrdiff_t>(pad.py);
    long long vertices = 0, edges = 0, faces = 0, cubes = 0;
    // each lattice element is owned by the padded voxel at its max corner
    for (std::size_t z = 1; z < pad.pz; ++z)
        for (std::size_t y = 1; y < pad.py; ++y)
            for (std::size_t x = 1; x < pad.px; ++x) {
                const auto i = static_cast<std::ptrdiff_t>(pad.index(x, y, z));
                auto at = [&](std::ptrdiff_t o) { return c[static_cast<std::size_t>(i - o)] != 0; };
                const bool b000 = at(0), b100 = at(sx), b010 = at(sy), b001 = at(sz);
                const bool b110 = at(sx + sy), b101 = at(sx + sz), b011 = at(sy + sz), b111 = at(sx + sy + sz);
                cubes += b000;
                faces += (b000 || b100) + (b000 || b010) + (b000 || b001);
                edges += (b000 || b100 || b010 || b110) + (b000 || b100 || b001 || b101) + (b000 || b010 || b001 || b011);
                vertices += b000 || b100 || b010 || b001 || b110 || b101 || b011 || b111;
            }
    return vertices - edges + faces - cubes;
}

Volume thin_volume(const Volume& v) {
    Padded pad(v);
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < pad.cells.size(); ++i)
        if (pad.cells[i]) alive.push_back(i);

    std::vector<std::size_t> candidates;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& dir : kDirections) {
            const auto step = pad.offsets[static_cast<std::size_t>(pos(dir[0], dir[1], dir[2]))];
            candidates.clear();
            for (std::size_t i : alive) {
                if (pad.cells[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + step)]) continue;
                if (deletable(pad.neighborhood(i))) candidates.push_back(i);
            }
            for (std::size_t i : candidates) {
                if (deletable(pad.neighborhood(i))) {
                    pad.cells[i] = 0;
                    changed = true;
                }
            }
            if (!candidates.empty())
                std::erase_if(alive, [&](std::size_t i) { return pad.cells[i] == 0; });
        }
    }

    auto out = Volume::zeros_binary(v.dims(), v.spacing());
    auto dst = out.u8_mut();
    const auto& d = v.dims();
    for (std::size_t z = 0; z < d.nz; ++z)
        for (std::size_t y = 0; y < d.ny; ++y)
            std::copy_n(pad.cells.data() + pad.index(1, y + 1, z + 1), d.nx, dst.data() + d.index(0, y, z));
    return out;
}

SkeletonGraph graph_from_skeleton_voxels(const Volume& v) {
    const auto& d = v.dims();
    const auto& s = v.spacing();
    const auto data = v.u8();
    constexpr auto kNone = static_cast<NodeId>(-1);
    std::vector<NodeId> ids(data.size(), kNone);

    SkeletonGraph g;
    for (std::size_t z = 0; z < d.nz; ++z)
        for (std::size_t y = 0; y < d.ny; ++y)
            for (std::size_t x = 0; x < d.nx; ++x) {
                const auto i = d.index(x, y, z);
                if (!data[i]) continue;
                ids[i] = static_cast<NodeId>(g.nodes.size());
                g.nodes.push_back({static_cast<double>(x) * s.x, static_cast<double>(y) * s.y,
                                   static_cast<double>(z) * s.z});
            }

    // the 13 neighbours that follow a voxel in raster order
    std::vector<std::array<int, 3>> forward;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if (dz > 0 || (dz == 0 && dy > 0) || (dz == 0 && dy == 0 && dx > 0)) forward.push_back({dx, dy, dz});

    for (std::size_t z = 0; z < d.nz; ++z)
        for (std::size_t y = 0; y < d.ny; ++y)
            for (std::size_t x = 0; x < d.nx; ++x) {
                const NodeId a = ids[d.index(x, y, z)];
                if (a == kNone) continue;
                for (const auto& o : forward) {
                    const auto xx = static_cast<std::ptrdiff_t>(x) + o[0];
                    const auto yy = static_cast<std::ptrdiff_t>(y) + o[1];
                    const auto zz = static_cast<std::ptrdiff_t>(z) + o[2];
                    if (xx < 0 || yy < 0 || xx >= static_cast<std::ptrdiff_t>(d.nx) ||
                        yy >= static_cast<std::ptrdiff_t>(d.ny) || zz >= static_cast<std::ptrdiff_t>(d.nz))
                        continue;
                    const NodeId b = ids[d.index(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy),
                                                 static_cast<std::size_t>(zz))];
                    if (b != kNone) g.edges.emplace_back(a, b);
                }
            }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

SkeletonGraph break_triangles(SkeletonGraph g) {
    auto adj = g.adjacency();
    auto length2 = [&](const std::pair<NodeId, NodeId>& e) {
        const auto& a = g.nodes[e.first];
        const auto& b = g.nodes[e.second];
        return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z);
    };
    auto key = [](std::pair<NodeId, NodeId> e) {
        if (e.first > e.second) std::swap(e.first, e.second);
        return e;
    };
    std::vector<std::pair<NodeId, NodeId>> order = g.edges;
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        const double la = length2(a), lb = length2(b);
        if (la != lb) return la > lb;
        return key(a) > key(b);
    });

    std::vector<std::pair<NodeId, NodeId>> removed;
    for (const auto& e : order) {
        auto& nu = adj[e.first];
        auto& nv = adj[e.second];
        // sorted neighbour lists: any common neighbour closes a triangle
        auto iu = nu.begin();
        auto iv = nv.begin();
        bool shared = false;
        while (iu != nu.end() && iv != nv.end()) {
            if (*iu == *iv) {
                shared = true;
                break;
            }
            if (*iu < *iv) ++iu;
            else ++iv;
        }
        if (!shared) continue;
        nu.erase(std::lower_bound(nu.begin(), nu.end(), e.second));
        nv.erase(std::lower_bound(nv.begin(), nv.end(), e.first));
        removed.push_back(key(e));
    }
    if (removed.empty()) return g;
    std::sort(removed.begin(), removed.end());
    std::erase_if(g.edges, [&](const auto& e) { return std::binary_search(removed.begin(), removed.end(), key(e)); });
    return g;
}

SkeletonGraph contract_junctions(const SkeletonGraph& g) {
    const auto adj = g.adjacency();
    const std::size_t n = g.nodes.size();
    auto is_junction = [&](std::size_t i) { return adj[i].size() > 2; };

    constexpr auto kNone = static_cast<NodeId>(-1);
    std::vector<NodeId> rep(n, kNone);
    std::vector<NodeId> stack;
    SkeletonGraph out;
    for (std::size_t i = 0; i < n; ++i) {
        if (rep[i] != kNone) continue;
        const auto id = static_cast<NodeId>(out.nodes.size());
        rep[i] = id;
        if (!is_junction(i)) {
            out.nodes.push_back(g.nodes[i]);
            continue;
        }
        Point3 sum{0, 0, 0};
        std::size_t members = 0;
        stack.assign(1, static_cast<NodeId>(i));
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            sum.x += g.nodes[u].x;
            sum.y += g.nodes[u].y;
            sum.z += g.nodes[u].z;
            ++members;
            for (NodeId w : adj[u])
                if (rep[w] == kNone && is_junction(w)) {
                    rep[w] = id;
                    stack.push_back(w);
                }
        }
        const auto m = static_cast<double>(members);
        out.nodes.push_back({sum.x / m, sum.y / m, sum.z / m});
    }

    for (auto [a, b] : g.edges) {
        NodeId u = rep[a], w = rep[b];
        if (u == w) continue;
        if (u > w) std::swap(u, w);
        out.edges.emplace_back(u, w);
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    return out;
}

SkeletonGraph skeletonize(const Volume& v) {
    return break_triangles(contract_junctions(graph_from_skeleton_voxels(thin_volume(v))));
}

}  // namespace toposcore
