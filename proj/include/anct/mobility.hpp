#pragma once

#include <vector>

#include "anct/config.hpp"
#include "anct/rng.hpp"
#include "anct/types.hpp"

namespace anct {

// Random-waypoint state for one node. Motion is computed from the leg
// anchor (leg_start, leg_start_time), never integrated incrementally,
// so advancing in one step or many gives bit-identical positions.
struct WaypointState {
    NodeId node = 0;
    Position current{};
    Position target{};
    double speed = 0.0;            // m/s, equals ScenarioConfig.speed
    Position leg_start{};          // where the current leg began
    double leg_start_time = 0.0;   // seconds
    double pause_until = 0.0;      // seconds; paused while t < pause_until
    bool paused = false;
};

// Uniform i.i.d. initial placement and first targets. Deterministic
// given the rng state.
std::vector<WaypointState> init_positions(const ValidatedConfig& cfg, Rng& rng);

// Moves one node from `from` to `to` seconds: travel toward the target
// at `speed`, pause `pause_time` on arrival, then draw a fresh uniform
// target. Handles any number of legs inside the window.
void advance(WaypointState& s, double from, double to, const ValidatedConfig& cfg, Rng& rng);

// Disk-graph adjacency: (a,b) adjacent iff distance <= radio_range.
// Symmetric, no self-edges.
struct Adjacency {
    std::uint32_t n = 0;
    std::vector<char> in_range;            // n*n matrix
    std::vector<std::vector<NodeId>> lists; // sorted neighbor lists

    bool adjacent(NodeId a, NodeId b) const {
        return a != b && in_range[static_cast<std::size_t>(a) * n + b] != 0;
    }
    const std::vector<NodeId>& neighbors_of(NodeId a) const { return lists[a]; }
};

Adjacency neighbors(const std::vector<std::pair<NodeId, Position>>& positions, double radio_range);

} // namespace anct
