#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "anct/config.hpp"
#include "anct/crypto.hpp"
#include "anct/mobility.hpp"
#include "anct/routing.hpp"

namespace anct {

// Run-level counters. data_sent = data_delivered + the four drop
// buckets, exactly, for every run.
struct Metrics {
    std::uint64_t data_sent = 0;
    std::uint64_t data_delivered = 0;
    std::uint64_t drops_attacker = 0;
    std::uint64_t drops_link = 0;
    std::uint64_t drops_queue = 0;
    std::uint64_t drops_noroute = 0;

    std::uint64_t control_packets_sent = 0;
    std::uint64_t control_bytes_sent = 0;

    std::uint64_t delay_sum_us = 0;
    std::uint64_t delay_count = 0;
    std::uint64_t payload_mismatches = 0; // end-to-end plaintext check, must stay 0

    struct FlowStats {
        std::uint64_t sent = 0;
        std::uint64_t delivered = 0;
        std::uint64_t delay_sum_us = 0;
    };
    std::map<FlowKey, FlowStats> flows;

    std::uint64_t total_drops() const {
        return drops_attacker + drops_link + drops_queue + drops_noroute;
    }
    double pdr() const {
        return data_sent == 0 ? 0.0
                              : static_cast<double>(data_delivered) / static_cast<double>(data_sent);
    }
    // Mean end-to-end delay; absent when nothing was delivered.
    std::optional<double> mean_delay_ms() const {
        if (delay_count == 0) return std::nullopt;
        return static_cast<double>(delay_sum_us) / static_cast<double>(delay_count) / 1e3;
    }
};

// Observation hooks for traces and test oracles.
struct FrameEvent {
    SimTime time{};
    NodeId from = 0;
    NodeId to = 0;
    PacketKind kind = PacketKind::Rreq;
    FlowKey flow{};
    std::uint32_t seq = 0;
    bool via_tunnel = false;
};

struct RrepEmitEvent {
    SimTime time{};
    NodeId destination = 0;
    NodeId source = 0;
    std::uint64_t p_r = 0;
    std::uint32_t route_id = 0;
};

struct EngineHooks {
    std::function<void(const TrustEvent&)> on_trust;
    std::function<void(const FrameEvent&)> on_frame_delivered;
    std::function<void(const RrepEmitEvent&)> on_rrep_emitted;
    std::function<void(SimTime, const std::vector<std::pair<NodeId, Position>>&)> on_positions;
};

// Test overrides: pin positions (static topology), pick attackers by
// hand, disable traffic.
struct EngineOptions {
    std::optional<std::vector<Position>> fixed_positions;
    std::optional<std::vector<AttackerProfile>> attackers;
    bool traffic_enabled = true;
    EngineHooks hooks;
};

// Deterministic discrete-event core: event queue, abstract link model
// (transmission + propagation + contention + Bernoulli loss, FIFO per
// transmitter), CBR traffic, mobility sampling, metrics collection.
class Engine : public NetCtx {
public:
    explicit Engine(const ValidatedConfig& cfg, EngineOptions opts = {});

    Metrics run();

    // Post-run inspection.
    const Node& node(NodeId n) const { return nodes_[n]; }
    const std::vector<FlowKey>& flows() const { return flows_; }
    const std::vector<AttackerProfile>& attackers() const { return attackers_; }
    const Metrics& metrics() const { return metrics_; }

    // NetCtx
    SimTime now() const override { return now_; }
    const ValidatedConfig& config() const override { return cfg_; }
    const KeyStore& keys() const override { return keystore_; }
    bool link_up(NodeId a, NodeId b) const override { return adjacency_.adjacent(a, b); }
    std::vector<NodeId> neighbors_of(NodeId n) const override { return adjacency_.neighbors_of(n); }
    void unicast(NodeId from, NodeId to, const Packet& p) override;
    void broadcast(NodeId from, const std::vector<NodeId>& targets, const Packet& p) override;
    void tunnel(NodeId from, NodeId to, const Packet& p) override;
    void schedule_discovery_timeout(NodeId node, NodeId dest,
                                    std::uint32_t route_id, SimTime when) override;
    void schedule_rrep_window(NodeId node, NodeId flow_source, SimTime when) override;
    void schedule_discovery_restart(NodeId node, NodeId dest, SimTime when) override;
    void data_delivered(const FlowKey& flow, std::uint32_t seq,
                        const std::vector<std::uint8_t>& plaintext) override;
    void data_dropped(const FlowKey& flow, std::uint32_t seq, DropCause cause,
                      std::optional<NodeId> attacker) override;
    void trust_updated(const TrustEvent& ev) override;
    void rrep_emitted(NodeId destination, NodeId flow_source,
                      std::uint64_t p_r, std::uint32_t route_id) override;

private:
    struct FrameDelivery {
        NodeId from;
        NodeId to;
        Packet packet;
        bool via_tunnel;
    };
    struct MobilityTick {};
    struct TrafficTick { std::uint32_t flow_index; std::uint32_t k; };
    struct TimerExpiry { NodeId node; NodeId dest; std::uint32_t route_id; };
    struct RrepWindow { NodeId node; NodeId flow_source; };
    struct DiscoveryRestart { NodeId node; NodeId dest; };
    struct FloodTick { NodeId node; };

    using EventPayload = std::variant<FrameDelivery, MobilityTick, TrafficTick, TimerExpiry,
                                      RrepWindow, DiscoveryRestart, FloodTick>;

    struct Event {
        SimTime time{};
        std::uint64_t seq = 0; // total-order tiebreaker, assigned at scheduling
        EventPayload payload;
    };
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time.us != b.time.us) return a.time.us > b.time.us;
            return a.seq > b.seq;
        }
    };

    void schedule(SimTime when, EventPayload payload);
    void setup_flows_and_attackers();
    void refresh_adjacency();
    void process(const Event& ev);
    void inject_data(std::uint32_t flow_index, std::uint32_t k);
    void transmit(NodeId from, const std::vector<NodeId>& targets, const Packet& p);
    SimTime tx_time(std::uint32_t size_bytes) const;
    std::uint32_t busy_neighbor_count(NodeId from) const;
    std::vector<std::uint8_t> make_payload(std::uint32_t flow_index, std::uint32_t seq) const;
    void finalize();

    ValidatedConfig cfg_;
    EngineOptions opts_;
    KeyStore keystore_;

    std::vector<Node> nodes_;
    std::vector<WaypointState> waypoints_;
    Adjacency adjacency_;
    std::vector<FlowKey> flows_;
    std::vector<AttackerProfile> attackers_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::uint64_t next_event_seq_ = 0;
    SimTime now_{};
    SimTime end_{};
    bool draining_ = false;
    double last_mobility_time_ = 0.0;

    // Link model state: per-node FIFO transmitter.
    std::vector<SimTime> busy_until_;
    std::vector<std::deque<SimTime>> tx_queue_starts_;

    // In-flight data accounting, keyed by (flow, seq).
    struct InFlight {
        SimTime injected{};
        std::uint32_t hops = 0;
        std::vector<std::uint8_t> original_payload;
    };
    std::map<std::pair<FlowKey, std::uint32_t>, InFlight> in_flight_;

    Rng mobility_rng_;
    Rng channel_rng_;
    Rng traffic_rng_;
    Rng adversary_rng_;

    Metrics metrics_;
};

} // namespace anct
