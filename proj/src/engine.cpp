#include "anct/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace anct {

namespace {

// Propagation at 3e8 m/s, rounded up so every hop delay is positive.
SimTime propagation_delay(double meters) {
    double us = meters / 300.0;
    auto t = static_cast<std::int64_t>(std::ceil(us));
    return SimTime::from_us(t < 1 ? 1 : t);
}

} // namespace

Engine::Engine(const ValidatedConfig& cfg, EngineOptions opts)
    : cfg_(cfg),
      opts_(std::move(opts)),
      keystore_(cfg.cfg.rng_seed, cfg.cfg.node_count),
      mobility_rng_(cfg.cfg.rng_seed, rng_stream::mobility),
      channel_rng_(cfg.cfg.rng_seed, rng_stream::channel),
      traffic_rng_(cfg.cfg.rng_seed, rng_stream::traffic),
      adversary_rng_(cfg.cfg.rng_seed, rng_stream::adversary) {
    const auto& c = cfg_.cfg;
    end_ = cfg_.duration();

    nodes_.reserve(c.node_count);
    for (NodeId i = 0; i < c.node_count; ++i) nodes_.emplace_back(i, c.protocol);

    waypoints_ = init_positions(cfg_, mobility_rng_);
    if (opts_.fixed_positions) {
        if (opts_.fixed_positions->size() != c.node_count)
            throw std::runtime_error("fixed_positions size mismatch");
        for (NodeId i = 0; i < c.node_count; ++i) {
            waypoints_[i].current = (*opts_.fixed_positions)[i];
            waypoints_[i].leg_start = waypoints_[i].current;
            waypoints_[i].target = waypoints_[i].current;
            waypoints_[i].speed = 0.0; // pinned topology does not move
        }
    }

    setup_flows_and_attackers();

    busy_until_.assign(c.node_count, SimTime::zero());
    tx_queue_starts_.assign(c.node_count, {});
    refresh_adjacency();
}

void Engine::setup_flows_and_attackers() {
    const auto& c = cfg_.cfg;

    flows_ = c.flow_pairs;
    if (flows_.empty()) {
        // Auto flows: disjoint random pairs drawn from the traffic stream.
        std::uint32_t want = std::min<std::uint32_t>(10, c.node_count / 2);
        std::vector<NodeId> ids(c.node_count);
        for (NodeId i = 0; i < c.node_count; ++i) ids[i] = i;
        for (std::uint32_t i = 0; i < 2 * want; ++i) {
            auto j = i + static_cast<std::uint32_t>(traffic_rng_.below(c.node_count - i));
            std::swap(ids[i], ids[j]);
        }
        for (std::uint32_t i = 0; i < want; ++i)
            flows_.push_back(FlowKey{ids[2 * i], ids[2 * i + 1]});
    }

    if (opts_.attackers) {
        attackers_ = *opts_.attackers;
    } else if (c.attacker_count > 0) {
        std::set<NodeId> endpoints;
        for (const auto& f : flows_) {
            endpoints.insert(f.source);
            endpoints.insert(f.destination);
        }
        std::vector<NodeId> candidates;
        for (NodeId i = 0; i < c.node_count; ++i)
            if (!endpoints.count(i)) candidates.push_back(i);
        if (candidates.size() < c.attacker_count)
            throw std::runtime_error("not enough non-endpoint nodes for attackers");
        for (std::uint32_t i = 0; i < c.attacker_count; ++i) {
            auto j = i + static_cast<std::uint32_t>(
                             adversary_rng_.below(candidates.size() - i));
            std::swap(candidates[i], candidates[j]);
        }
        for (std::uint32_t i = 0; i < c.attacker_count; ++i) {
            AttackerProfile p;
            p.node = candidates[i];
            p.kind = c.attack_kind;
            if (c.attack_kind == AttackKind::flooding) p.flood_rate = c.flood_rate;
            if (c.attack_kind == AttackKind::wormhole)
                p.partner = candidates[i % 2 == 0 ? i + 1 : i - 1];
            attackers_.push_back(p);
        }
    }

    for (const auto& p : attackers_) {
        if (p.node >= c.node_count) throw std::runtime_error("attacker id out of range");
        nodes_[p.node].set_attacker(p);
    }
}

void Engine::refresh_adjacency() {
    std::vector<std::pair<NodeId, Position>> pos;
    pos.reserve(waypoints_.size());
    for (const auto& w : waypoints_) pos.emplace_back(w.node, w.current);
    adjacency_ = neighbors(pos, cfg_.cfg.radio_range);
    if (opts_.hooks.on_positions) opts_.hooks.on_positions(now_, pos);
}

void Engine::schedule(SimTime when, EventPayload payload) {
    queue_.push(Event{when, next_event_seq_++, std::move(payload)});
}

SimTime Engine::tx_time(std::uint32_t size_bytes) const {
    // size * 8 / capacity seconds, in integer microseconds.
    std::uint64_t us = static_cast<std::uint64_t>(size_bytes) * 8ULL * 1'000'000ULL /
                       cfg_.cfg.channel_capacity;
    return SimTime::from_us(us < 1 ? 1 : static_cast<std::int64_t>(us));
}

std::uint32_t Engine::busy_neighbor_count(NodeId from) const {
    std::uint32_t n = 0;
    for (NodeId j : adjacency_.neighbors_of(from))
        if (busy_until_[j] > now_) ++n;
    return n;
}

void Engine::transmit(NodeId from, const std::vector<NodeId>& targets, const Packet& p) {
    if (targets.empty()) return;
    const auto& c = cfg_.cfg;
    bool is_data = p.kind == PacketKind::Data;

    // FIFO transmitter: drop transmissions whose start time has passed,
    // then apply the queue cap to what is still waiting.
    auto& q = tx_queue_starts_[from];
    while (!q.empty() && q.front() <= now_) q.pop_front();
    if (q.size() >= c.queue_cap) {
        if (is_data)
            data_dropped(FlowKey{p.source, p.destination}, p.seq, DropCause::queue, std::nullopt);
        return;
    }

    SimTime start = std::max(now_, busy_until_[from]);
    SimTime tx = tx_time(p.size_bytes());
    busy_until_[from] = start + tx;
    q.push_back(start);

    std::uint32_t busy = busy_neighbor_count(from);

    for (NodeId to : targets) {
        if (!is_data) {
            metrics_.control_packets_sent += 1;
            metrics_.control_bytes_sent += p.size_bytes();
        }
        if (c.loss_probability > 0.0 && channel_rng_.uniform() < c.loss_probability) {
            if (is_data)
                data_dropped(FlowKey{p.source, p.destination}, p.seq,
                             DropCause::link_loss, std::nullopt);
            continue;
        }
        SimTime contention = SimTime::zero();
        if (busy > 0 && c.contention_mean_ms > 0.0) {
            double ms = channel_rng_.exponential(c.contention_mean_ms * busy);
            if (ms > c.contention_cap_ms) ms = c.contention_cap_ms;
            contention = SimTime::from_us(static_cast<std::int64_t>(std::llround(ms * 1e3)));
        }
        double dist = distance(waypoints_[from].current, waypoints_[to].current);
        SimTime when = start + tx + propagation_delay(dist) + contention;
        schedule(when, FrameDelivery{from, to, p, false});
    }
}

void Engine::unicast(NodeId from, NodeId to, const Packet& p) {
    if (!adjacency_.adjacent(from, to)) {
        // Radio silence: a unicast to a node out of range dies on the
        // air. Data keeps conservation through the no_route bucket.
        if (p.kind == PacketKind::Data)
            data_dropped(FlowKey{p.source, p.destination}, p.seq,
                         DropCause::no_route, std::nullopt);
        return;
    }
    transmit(from, {to}, p);
}

void Engine::broadcast(NodeId from, const std::vector<NodeId>& targets, const Packet& p) {
    transmit(from, targets, p);
}

void Engine::tunnel(NodeId from, NodeId to, const Packet& p) {
    schedule(now_ + SimTime::from_us(1), FrameDelivery{from, to, p, true});
}

void Engine::schedule_discovery_timeout(NodeId node, NodeId dest,
                                        std::uint32_t route_id, SimTime when) {
    schedule(when, TimerExpiry{node, dest, route_id});
}

void Engine::schedule_rrep_window(NodeId node, NodeId flow_source, SimTime when) {
    schedule(when, RrepWindow{node, flow_source});
}

void Engine::schedule_discovery_restart(NodeId node, NodeId dest, SimTime when) {
    schedule(when, DiscoveryRestart{node, dest});
}

void Engine::data_delivered(const FlowKey& flow, std::uint32_t seq,
                            const std::vector<std::uint8_t>& plaintext) {
    auto it = in_flight_.find({flow, seq});
    if (it == in_flight_.end()) return; // already accounted (stale duplicate)
    if (plaintext != it->second.original_payload) metrics_.payload_mismatches += 1;

    std::uint64_t delay = static_cast<std::uint64_t>((now_ - it->second.injected).us);
    metrics_.data_delivered += 1;
    metrics_.delay_sum_us += delay;
    metrics_.delay_count += 1;
    auto& fs = metrics_.flows[flow];
    fs.delivered += 1;
    fs.delay_sum_us += delay;
    in_flight_.erase(it);
}

void Engine::data_dropped(const FlowKey& flow, std::uint32_t seq, DropCause cause,
                          std::optional<NodeId>) {
    auto it = in_flight_.find({flow, seq});
    if (it == in_flight_.end()) return;
    switch (cause) {
        case DropCause::attacker: metrics_.drops_attacker += 1; break;
        case DropCause::link_loss: metrics_.drops_link += 1; break;
        case DropCause::queue: metrics_.drops_queue += 1; break;
        case DropCause::no_route: metrics_.drops_noroute += 1; break;
    }
    in_flight_.erase(it);
}

void Engine::trust_updated(const TrustEvent& ev) {
    if (opts_.hooks.on_trust) opts_.hooks.on_trust(ev);
}

void Engine::rrep_emitted(NodeId destination, NodeId flow_source,
                          std::uint64_t p_r, std::uint32_t route_id) {
    if (opts_.hooks.on_rrep_emitted)
        opts_.hooks.on_rrep_emitted(RrepEmitEvent{now_, destination, flow_source, p_r, route_id});
}

std::vector<std::uint8_t> Engine::make_payload(std::uint32_t flow_index,
                                               std::uint32_t seq) const {
    // Pseudo-random payload reproducible from (seed, flow, seq) alone.
    std::uint64_t s = cfg_.cfg.rng_seed ^ (0x9e3779b97f4a7c15ULL * (flow_index + 1)) ^
                      (0xc2b2ae3d27d4eb4fULL * (seq + 1));
    std::vector<std::uint8_t> out(cfg_.cfg.packet_size);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i % 8 == 0) word = splitmix64(s);
        out[i] = static_cast<std::uint8_t>(word >> (8 * (i % 8)));
    }
    return out;
}

void Engine::inject_data(std::uint32_t flow_index, std::uint32_t k) {
    const FlowKey& flow = flows_[flow_index];
    std::uint32_t seq = k;
    auto payload = make_payload(flow_index, seq);

    metrics_.data_sent += 1;
    metrics_.flows[flow].sent += 1;
    in_flight_[{flow, seq}] = InFlight{now_, 0, payload};

    nodes_[flow.source].send_data(*this, flow.destination, seq, payload);
}

Metrics Engine::run() {
    const auto& c = cfg_.cfg;

    // Generator events stop at the end of the run; everything already
    // in the air afterwards drains into the drop accounting.
    for (std::uint64_t k = 1;; ++k) {
        SimTime when = SimTime::from_seconds(c.mobility_tick * static_cast<double>(k));
        if (when > end_) break;
        schedule(when, MobilityTick{});
    }

    if (opts_.traffic_enabled) {
        std::int64_t period_us = static_cast<std::int64_t>(std::llround(1e6 / c.cbr_rate));
        if (period_us < 1) period_us = 1;
        std::int64_t start_us = SimTime::from_seconds(c.flow_start).us;
        for (std::uint32_t f = 0; f < flows_.size(); ++f) {
            std::uint32_t k = 0;
            for (std::int64_t t = start_us; t < end_.us; t += period_us, ++k) {
                schedule(SimTime::from_us(t), TrafficTick{f, k});
            }
        }
    }

    for (const auto& p : attackers_) {
        if (p.kind == AttackKind::flooding && p.flood_rate > 0.0) {
            std::int64_t period_us = static_cast<std::int64_t>(std::llround(1e6 / p.flood_rate));
            if (period_us < 1) period_us = 1;
            // rate x duration junk requests, starting immediately
            for (std::int64_t t = 0; t < end_.us; t += period_us) {
                schedule(SimTime::from_us(t), FloodTick{p.node});
            }
        }
    }

    while (!queue_.empty()) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.time;
        if (now_ > end_ && !draining_) draining_ = true;
        process(ev);
    }

    finalize();
    return metrics_;
}

void Engine::process(const Event& ev) {
    if (auto* fd = std::get_if<FrameDelivery>(&ev.payload)) {
        if (draining_) {
            if (fd->packet.kind == PacketKind::Data)
                data_dropped(FlowKey{fd->packet.source, fd->packet.destination},
                             fd->packet.seq, DropCause::no_route, std::nullopt);
            return;
        }
        if (opts_.hooks.on_frame_delivered) {
            FrameEvent fe;
            fe.time = now_;
            fe.from = fd->from;
            fe.to = fd->to;
            fe.kind = fd->packet.kind;
            fe.flow = FlowKey{fd->packet.source, fd->packet.destination};
            fe.seq = fd->packet.seq;
            fe.via_tunnel = fd->via_tunnel;
            opts_.hooks.on_frame_delivered(fe);
        }
        if (fd->packet.kind == PacketKind::Data) {
            auto it = in_flight_.find({FlowKey{fd->packet.source, fd->packet.destination},
                                       fd->packet.seq});
            if (it != in_flight_.end()) it->second.hops += 1;
        }
        nodes_[fd->to].on_frame(*this, fd->from, fd->packet, fd->via_tunnel);
        return;
    }
    if (std::get_if<MobilityTick>(&ev.payload)) {
        double to = now_.seconds();
        for (auto& w : waypoints_) advance(w, last_mobility_time_, to, cfg_, mobility_rng_);
        last_mobility_time_ = to;
        refresh_adjacency();
        return;
    }
    if (auto* tt = std::get_if<TrafficTick>(&ev.payload)) {
        inject_data(tt->flow_index, tt->k);
        return;
    }
    if (auto* te = std::get_if<TimerExpiry>(&ev.payload)) {
        if (draining_) return; // no rediscovery past the end of the run
        nodes_[te->node].on_discovery_timeout(*this, te->dest, te->route_id);
        return;
    }
    if (auto* rw = std::get_if<RrepWindow>(&ev.payload)) {
        if (draining_) return;
        nodes_[rw->node].on_rrep_window(*this, rw->flow_source);
        return;
    }
    if (auto* dr = std::get_if<DiscoveryRestart>(&ev.payload)) {
        if (draining_) return;
        nodes_[dr->node].on_discovery_restart(*this, dr->dest);
        return;
    }
    if (auto* ft = std::get_if<FloodTick>(&ev.payload)) {
        nodes_[ft->node].flood_tick(*this, adversary_rng_);
        return;
    }
}

void Engine::finalize() {
    for (auto& n : nodes_) n.drop_all_pending(*this);
    // Anything still unaccounted (stuck mid-discovery with the timer
    // suppressed by draining) goes to no_route.
    while (!in_flight_.empty()) {
        auto it = in_flight_.begin();
        metrics_.drops_noroute += 1;
        in_flight_.erase(it);
    }
}

} // namespace anct
