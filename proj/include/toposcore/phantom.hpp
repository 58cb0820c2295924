#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "toposcore/skeleton.hpp"
#include "toposcore/volume.hpp"

namespace toposcore {

struct PhantomSpec {
    std::uint64_t seed = 0;
    Dims dims{64, 64, 64};
    std::size_t n_components = 1;
    std::vector<std::size_t> loops_per_component;  // empty = no loops
    double tube_radius = 2.0;                      // voxels
    double jitter = 0.0;                           // max waypoint displacement per axis, voxels
    double lattice_spacing = 16.0;                 // waypoint grid pitch, voxels
    std::size_t nodes_per_component = 6;           // minimum waypoints per component
    double border = 0.0;                           // extra clearance around each component's box, e.g. room for shifts

    void validate() const;
};

/// Spreads `total` loops over `n_components` round-robin.
std::vector<std::size_t> distribute_loops(std::size_t total, std::size_t n_components);

/// Waypoint graph the phantom is rasterized from. Each component lives on its
/// own lattice inside its own box of the grid; edges join lattice neighbours.
struct Centerline {
    struct Cell {
        std::array<double, 3> origin{};     // voxel coordinates of lattice point (0,0,0)
        std::array<int, 3> extent{1, 1, 1};  // lattice points per axis
    };

    std::vector<Cell> cells;
    std::vector<std::array<int, 3>> lattice;  // lattice coordinates per waypoint
    std::vector<std::uint32_t> cell_of;       // owning cell per waypoint
    std::vector<Point3> position;             // voxel coordinates, jitter and shifts applied
    std::vector<std::pair<NodeId, NodeId>> edges;

    SkeletonGraph graph() const;
};

struct PhantomCounts {
    std::size_t components = 0;
    std::size_t loops = 0;
    friend bool operator==(const PhantomCounts&, const PhantomCounts&) = default;
};

struct PhantomTruth {
    Volume volume;
    SkeletonGraph skeleton;  // centerline resampled at ~1 voxel
    PhantomCounts counts;
    Centerline centerline;
    PhantomSpec spec;
};

PhantomTruth generate_phantom(const PhantomSpec& spec);

struct Corruption {
    enum class Kind { break_edge, add_spur, add_bridge, shift };
    Kind kind = Kind::break_edge;
    std::array<double, 3> offset{};  // shift only

    static Corruption break_edge() { return {Kind::break_edge, {}}; }
    static Corruption add_spur() { return {Kind::add_spur, {}}; }
    static Corruption add_bridge() { return {Kind::add_bridge, {}}; }
    static Corruption shift(double dx, double dy, double dz) { return {Kind::shift, {dx, dy, dz}}; }
};

/// Applies the corruptions to the centerline, then re-renders and recounts.
PhantomTruth corrupt_phantom(const PhantomTruth& truth, const std::vector<Corruption>& ops, std::uint64_t seed);

/// Rasterizes the centerline as tubes and resamples it into a skeleton.
PhantomTruth render_phantom(const Centerline& c, const PhantomSpec& spec);

}  // namespace toposcore
