#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "anct/adversary.hpp"
#include "anct/config.hpp"
#include "anct/crypto.hpp"
#include "anct/packet.hpp"
#include "anct/rng.hpp"
#include "anct/types.hpp"

namespace anct {

// Per-neighbor trust record. Trust is held in integer micro-units; a
// neighbor is marked malicious the moment tc drops to or below the
// trusted threshold, and the mark is permanent for the run.
struct AnctEntry {
    NodeId neighbor = 0;
    std::uint64_t fc = 0;        // forward counter: frames this neighbor delivered to us
    std::int64_t tc_units = 0;   // trust counter, millionths
    double sr = 0.0;             // last computed success ratio
    bool sr_valid = false;       // false until the first SR evaluation
    bool malicious = false;

    double tc() const { return static_cast<double>(tc_units) / 1e6; }
};

// The per-node counter table: one entry per observed neighbor.
struct AnctTable {
    NodeId owner = 0;
    std::map<NodeId, AnctEntry> entries;

    bool is_malicious(NodeId n) const {
        auto it = entries.find(n);
        return it != entries.end() && it->second.malicious;
    }
};

// Source-side state of one route discovery.
struct DiscoveryState {
    NodeId source = 0;
    NodeId destination = 0;
    std::uint32_t route_id = 0;  // 1 for the first attempt, +1 per retry
    std::uint32_t rreq_seq = 0;
    SimTime deadline{};
    bool resolved = false;
    bool waiting_rrep = false;   // timeout timer armed
    bool backing_off = false;    // restart timer armed
    std::uint32_t retries_done = 0;
};

// Destination-side epoch for one flow: P_R accumulates every protocol
// packet (RREQ copies and data frames) received for the flow since the
// last RREP was issued for it.
struct EpochState {
    std::uint64_t p_r = 0;
    bool window_open = false;          // RREQ collection window in progress
    std::vector<NodeId> pending_route; // first-arrival hop record + self
    std::uint32_t pending_route_id = 0;
};

struct TrustEvent {
    SimTime time{};
    NodeId observer = 0;
    NodeId neighbor = 0;
    std::uint64_t fc = 0;
    std::int64_t tc_units = 0;
    double sr = 0.0;
    bool sr_valid = false;
    bool malicious = false;
};

enum class DropCause { attacker, link_loss, queue, no_route };

// Services a node needs from the simulation around it. The engine is
// the production implementation; tests drive nodes through scripted
// ones to pin down handler behavior exactly.
class NetCtx {
public:
    virtual ~NetCtx() = default;

    virtual SimTime now() const = 0;
    virtual const ValidatedConfig& config() const = 0;
    virtual const KeyStore& keys() const = 0;
    virtual bool link_up(NodeId a, NodeId b) const = 0;
    virtual std::vector<NodeId> neighbors_of(NodeId n) const = 0;

    virtual void unicast(NodeId from, NodeId to, const Packet& p) = 0;
    virtual void broadcast(NodeId from, const std::vector<NodeId>& targets, const Packet& p) = 0;
    virtual void tunnel(NodeId from, NodeId to, const Packet& p) = 0;

    virtual void schedule_discovery_timeout(NodeId node, NodeId dest,
                                            std::uint32_t route_id, SimTime when) = 0;
    virtual void schedule_rrep_window(NodeId node, NodeId flow_source, SimTime when) = 0;
    virtual void schedule_discovery_restart(NodeId node, NodeId dest, SimTime when) = 0;

    virtual void data_delivered(const FlowKey& flow, std::uint32_t seq,
                                const std::vector<std::uint8_t>& plaintext) = 0;
    virtual void data_dropped(const FlowKey& flow, std::uint32_t seq, DropCause cause,
                              std::optional<NodeId> attacker) = 0;
    virtual void trust_updated(const TrustEvent& ev) = 0;
    virtual void rrep_emitted(NodeId destination, NodeId flow_source,
                              std::uint64_t p_r, std::uint32_t route_id) = 0;
};

// One network node: AODV-style discovery handlers augmented with the
// assured-neighbor counter table, plus the attacker overrides. In
// baseline mode the message flow (packet construction, sizes, hop
// crypto) is identical; verification, trust updates and exclusion are
// simply skipped.
class Node {
public:
    Node() = default;
    Node(NodeId id, Protocol protocol);

    void set_attacker(const AttackerProfile& p) { attacker_ = p; }
    const std::optional<AttackerProfile>& attacker() const { return attacker_; }

    NodeId id() const { return id_; }
    const AnctTable& anct() const { return anct_; }
    const std::map<NodeId, RouteEntry>& routes() const { return routes_; }
    const std::map<NodeId, DiscoveryState>& discoveries() const { return discovery_; }
    std::size_t pending_count(NodeId dest) const;

    // Frame entry point: dispatches on kind and attacker profile.
    void on_frame(NetCtx& ctx, NodeId from, const Packet& p, bool via_tunnel);

    // Traffic entry point at the source: transmit now or queue while a
    // route is (re)discovered.
    void send_data(NetCtx& ctx, NodeId dest, std::uint32_t seq,
                   const std::vector<std::uint8_t>& payload);

    void on_discovery_timeout(NetCtx& ctx, NodeId dest, std::uint32_t route_id);
    void on_discovery_restart(NetCtx& ctx, NodeId dest);
    void on_rrep_window(NetCtx& ctx, NodeId flow_source);
    void flood_tick(NetCtx& ctx, Rng& rng);

    // Drains every queued data packet as undeliverable (end of run).
    void drop_all_pending(NetCtx& ctx);

private:
    struct PendingData {
        std::uint32_t seq = 0;
        std::vector<std::uint8_t> payload;
    };

    void on_rreq(NetCtx& ctx, NodeId from, const Packet& p, bool via_tunnel);
    void on_rrep(NetCtx& ctx, NodeId from, const Packet& p, bool via_tunnel);
    void on_data(NetCtx& ctx, NodeId from, const Packet& p);

    void destination_on_rreq(NetCtx& ctx, const Packet& p);
    void initiate_discovery(NetCtx& ctx, NodeId dest);
    void ensure_discovery(NetCtx& ctx, NodeId dest);
    void transmit_data(NetCtx& ctx, const RouteEntry& route, std::uint32_t seq,
                       const std::vector<std::uint8_t>& plaintext);
    void flush_pending(NetCtx& ctx, NodeId dest);

    bool verify_rrep(NetCtx& ctx, const Packet& rrep, std::size_t pos, NodeId from) const;
    AnctEntry& entry(NodeId neighbor, NetCtx& ctx);
    void count_frame(NetCtx& ctx, NodeId from, const Packet& p);
    void trust_step(NetCtx& ctx, NodeId neighbor, std::int64_t delta_units);
    void record_sr(NetCtx& ctx, NodeId neighbor, double sr);
    void emit_trust(NetCtx& ctx, const AnctEntry& e);
    std::vector<NodeId> eligible_neighbors(NetCtx& ctx) const;

    bool anct_enabled() const { return protocol_ == Protocol::anct; }

    // Attacker behaviors (handler overrides).
    void blackhole_on_rreq(NetCtx& ctx, NodeId from, const Packet& p);
    void wormhole_on_rreq(NetCtx& ctx, const Packet& p, bool via_tunnel);
    void wormhole_on_rrep(NetCtx& ctx, const Packet& p, bool via_tunnel);

    NodeId id_ = 0;
    Protocol protocol_ = Protocol::anct;
    std::optional<AttackerProfile> attacker_;

    AnctTable anct_;
    std::map<NodeId, RouteEntry> routes_;          // keyed by destination
    std::map<NodeId, DiscoveryState> discovery_;   // keyed by destination
    std::map<NodeId, std::uint32_t> route_id_counter_;
    std::map<NodeId, std::deque<PendingData>> pending_;
    std::set<std::pair<NodeId, std::uint32_t>> seen_rreq_;       // (source, seq)
    std::map<std::pair<NodeId, std::uint32_t>, NodeId> reverse_path_;
    std::map<NodeId, EpochState> epochs_;          // destination side, keyed by source
    std::map<FlowKey, std::map<NodeId, std::uint64_t>> flow_tally_; // per-flow SR windows
    std::uint32_t next_rreq_seq_ = 0;
};

} // namespace anct
