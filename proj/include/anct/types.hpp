#pragma once

#include <cstdint>
#include <compare>
#include <string>
#include <utility>

namespace anct {

// Node identifier, unique per scenario: 0 <= id < node_count.
using NodeId = std::uint32_t;

// Simulation time in integer microseconds. Integer ticks keep event
// ordering exact across runs; no float drift can reorder the queue.
struct SimTime {
    std::int64_t us = 0;

    static constexpr SimTime zero() { return SimTime{0}; }
    static constexpr SimTime from_us(std::int64_t v) { return SimTime{v}; }
    static SimTime from_seconds(double s);

    double seconds() const { return static_cast<double>(us) / 1e6; }
    double millis() const { return static_cast<double>(us) / 1e3; }

    auto operator<=>(const SimTime&) const = default;
    SimTime operator+(SimTime o) const { return SimTime{us + o.us}; }
    SimTime operator-(SimTime o) const { return SimTime{us - o.us}; }
    SimTime& operator+=(SimTime o) { us += o.us; return *this; }
};

// Planar position in meters.
struct Position {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);

// A traffic flow is identified by its endpoints.
struct FlowKey {
    NodeId source = 0;
    NodeId destination = 0;

    auto operator<=>(const FlowKey&) const = default;
};

enum class AttackKind { none, blackhole, flooding, wormhole };
enum class Protocol { anct, baseline_aodv };

std::string to_string(AttackKind k);
std::string to_string(Protocol p);
bool attack_kind_from_string(const std::string& s, AttackKind& out);
bool protocol_from_string(const std::string& s, Protocol& out);

} // namespace anct
