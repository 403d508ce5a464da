#include "anct/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace anct {

namespace {

Position draw_position(const ScenarioConfig& c, Rng& rng) {
    return Position{rng.uniform(0.0, c.area_width), rng.uniform(0.0, c.area_height)};
}

} // namespace

std::vector<WaypointState> init_positions(const ValidatedConfig& vcfg, Rng& rng) {
    const auto& c = vcfg.cfg;
    std::vector<WaypointState> out;
    out.reserve(c.node_count);
    for (NodeId i = 0; i < c.node_count; ++i) {
        WaypointState s;
        s.node = i;
        s.current = draw_position(c, rng);
        s.target = draw_position(c, rng);
        s.speed = c.speed;
        s.leg_start = s.current;
        s.leg_start_time = 0.0;
        s.pause_until = 0.0;
        s.paused = false;
        out.push_back(s);
    }
    return out;
}

void advance(WaypointState& s, double from, double to, const ValidatedConfig& vcfg, Rng& rng) {
    const auto& c = vcfg.cfg;
    if (to <= from || s.speed <= 0.0) return;

    if (s.paused) {
        if (to < s.pause_until) return; // still pausing at the target
        // Pause over: draw the next waypoint. The leg anchors at the
        // absolute pause end, so motion deferred past a park is caught
        // up exactly on the next sample.
        s.paused = false;
        s.target = draw_position(c, rng);
        s.leg_start = s.current;
        s.leg_start_time = s.pause_until;
    }

    double dist = distance(s.leg_start, s.target);
    double arrival = dist > 0.0 ? s.leg_start_time + dist / s.speed : s.leg_start_time;
    if (dist > 0.0 && to < arrival) {
        // Position from the leg anchor, never integrated, so splitting
        // the window at any intermediate time lands on the same point.
        double frac = (to - s.leg_start_time) * s.speed / dist;
        s.current.x = s.leg_start.x + (s.target.x - s.leg_start.x) * frac;
        s.current.y = s.leg_start.y + (s.target.y - s.leg_start.y) * frac;
        return;
    }
    // Arrived inside the window: park here; no new target until a later
    // window reaches past the pause.
    s.current = s.target;
    s.paused = true;
    s.pause_until = arrival + c.pause_time;
}

Adjacency neighbors(const std::vector<std::pair<NodeId, Position>>& positions, double radio_range) {
    Adjacency adj;
    adj.n = static_cast<std::uint32_t>(positions.size());
    adj.in_range.assign(static_cast<std::size_t>(adj.n) * adj.n, 0);
    adj.lists.assign(adj.n, {});
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if (distance(positions[i].second, positions[j].second) <= radio_range) {
                NodeId a = positions[i].first;
                NodeId b = positions[j].first;
                adj.in_range[static_cast<std::size_t>(a) * adj.n + b] = 1;
                adj.in_range[static_cast<std::size_t>(b) * adj.n + a] = 1;
                adj.lists[a].push_back(b);
                adj.lists[b].push_back(a);
            }
        }
    }
    for (auto& l : adj.lists) std::sort(l.begin(), l.end());
    return adj;
}

} // namespace anct
