#include "anct/routing.hpp"

#include <algorithm>

namespace anct {

Node::Node(NodeId id, Protocol protocol) : id_(id), protocol_(protocol) {
    anct_.owner = id;
}

std::size_t Node::pending_count(NodeId dest) const {
    auto it = pending_.find(dest);
    return it == pending_.end() ? 0 : it->second.size();
}

AnctEntry& Node::entry(NodeId neighbor, NetCtx& ctx) {
    auto it = anct_.entries.find(neighbor);
    if (it == anct_.entries.end()) {
        AnctEntry e;
        e.neighbor = neighbor;
        e.tc_units = ctx.config().tc_initial_units;
        it = anct_.entries.emplace(neighbor, e).first;
    }
    return it->second;
}

void Node::emit_trust(NetCtx& ctx, const AnctEntry& e) {
    TrustEvent ev;
    ev.time = ctx.now();
    ev.observer = id_;
    ev.neighbor = e.neighbor;
    ev.fc = e.fc;
    ev.tc_units = e.tc_units;
    ev.sr = e.sr;
    ev.sr_valid = e.sr_valid;
    ev.malicious = e.malicious;
    ctx.trust_updated(ev);
}

void Node::trust_step(NetCtx& ctx, NodeId neighbor, std::int64_t delta_units) {
    AnctEntry& e = entry(neighbor, ctx);
    if (e.malicious) return; // verdict is permanent
    e.tc_units += delta_units;
    if (e.tc_units <= ctx.config().t_trust_units) e.malicious = true;
    emit_trust(ctx, e);
}

void Node::record_sr(NetCtx& ctx, NodeId neighbor, double sr) {
    AnctEntry& e = entry(neighbor, ctx);
    if (e.malicious) return;
    e.sr = sr;
    e.sr_valid = true;
    emit_trust(ctx, e);
}

// Eq. 1: every frame received from a neighbor bumps that neighbor's
// forward counter, even duplicates and frames that are dropped next.
void Node::count_frame(NetCtx& ctx, NodeId from, const Packet& p) {
    entry(from, ctx).fc += 1;
    flow_tally_[FlowKey{p.source, p.destination}][from] += 1;
}

std::vector<NodeId> Node::eligible_neighbors(NetCtx& ctx) const {
    std::vector<NodeId> out;
    for (NodeId n : ctx.neighbors_of(id_)) {
        if (anct_enabled() && anct_.is_malicious(n)) continue; // mark and sweep
        out.push_back(n);
    }
    return out;
}

// ------------------------------------------------------------------
// Frame dispatch

void Node::on_frame(NetCtx& ctx, NodeId from, const Packet& p, bool via_tunnel) {
    switch (p.kind) {
        case PacketKind::Rreq: on_rreq(ctx, from, p, via_tunnel); break;
        case PacketKind::Rrep: on_rrep(ctx, from, p, via_tunnel); break;
        case PacketKind::Data: on_data(ctx, from, p); break;
    }
}

void Node::on_rreq(NetCtx& ctx, NodeId from, const Packet& p, bool via_tunnel) {
    if (attacker_ && attacker_->kind == AttackKind::blackhole) {
        count_frame(ctx, from, p); // counted even by liars
        blackhole_on_rreq(ctx, from, p);
        return;
    }
    if (attacker_ && attacker_->kind == AttackKind::wormhole) {
        count_frame(ctx, from, p);
        wormhole_on_rreq(ctx, p, via_tunnel);
        return;
    }

    count_frame(ctx, from, p);
    if (anct_enabled() && anct_.is_malicious(from)) return; // counted, then dropped

    if (id_ == p.destination) {
        destination_on_rreq(ctx, p); // every copy feeds P_R
        return;
    }

    auto key = std::make_pair(p.source, p.seq);
    if (seen_rreq_.count(key)) return; // duplicate: counted, not re-forwarded
    seen_rreq_.insert(key);
    reverse_path_[key] = from;

    if (std::find(p.hop_record.begin(), p.hop_record.end(), id_) != p.hop_record.end()) return;

    Packet fwd = p;
    fwd.hop_record.push_back(id_);
    fwd.originator_of_hop = id_;
    ctx.broadcast(id_, eligible_neighbors(ctx), fwd);
}

void Node::destination_on_rreq(NetCtx& ctx, const Packet& p) {
    EpochState& ep = epochs_[p.source];
    ep.p_r += 1;
    if (!ep.window_open) {
        // First RREQ of the epoch opens a short collection window so
        // P_R can reflect copies arriving over other paths.
        ep.window_open = true;
        ep.pending_route = p.hop_record;
        ep.pending_route.push_back(id_);
        ep.pending_route_id = p.route_id;
        ctx.schedule_rrep_window(id_, p.source, ctx.now() + ctx.config().collect_window());
    }
}

void Node::on_rrep_window(NetCtx& ctx, NodeId flow_source) {
    EpochState& ep = epochs_[flow_source];
    if (!ep.window_open) return;

    Packet rrep;
    rrep.kind = PacketKind::Rrep;
    rrep.source = flow_source;
    rrep.destination = id_;
    rrep.originator_of_hop = id_;
    rrep.route_id = ep.pending_route_id;
    rrep.route = ep.pending_route;
    rrep.p_r = ep.p_r;

    const KeyStore& ks = ctx.keys();
    rrep.has_mac = true;
    rrep.mac_tag = mac_compute(ks.flow_mac_key(flow_source, id_),
                               pr_mac_bytes(rrep.p_r, rrep.route_id));
    rrep.signatures.push_back(ks.sign(id_, rrep_body_bytes(rrep)));

    ctx.rrep_emitted(id_, flow_source, rrep.p_r, rrep.route_id);

    // Epoch ends when the reply is issued.
    ep.p_r = 0;
    ep.window_open = false;
    ep.pending_route.clear();

    if (rrep.route.size() >= 2) {
        NodeId next = rrep.route[rrep.route.size() - 2];
        ctx.unicast(id_, next, rrep);
    }
}

// Chain check for a node sitting at route[pos]: the reply must carry
// the destination's signature first, then one valid signature from
// every hop it already passed, in forwarding order, and must have come
// from the next hop toward the destination.
bool Node::verify_rrep(NetCtx& ctx, const Packet& rrep, std::size_t pos, NodeId from) const {
    const auto& route = rrep.route;
    std::size_t len = route.size();
    if (len < 2) return false;
    if (route[0] != rrep.source || route[len - 1] != rrep.destination) return false;
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = i + 1; j < len; ++j)
            if (route[i] == route[j]) return false;
    if (from != route[pos + 1]) return false;

    if (!rrep.has_mac) return false;
    if (rrep.signatures.empty()) return false;
    if (rrep.signatures[0].signer != rrep.destination) return false;

    std::size_t expected = len - 1 - pos; // destination + hops behind us
    if (rrep.signatures.size() != expected) return false;
    auto body = rrep_body_bytes(rrep);
    const KeyStore& ks = ctx.keys();
    for (std::size_t i = 0; i < expected; ++i) {
        NodeId signer = route[len - 1 - i];
        if (rrep.signatures[i].signer != signer) return false;
        if (!ks.verify_sig(body, rrep.signatures[i])) return false;
    }

    // The MAC on P_R under the flow's shared key, checked through the
    // key store's oracle.
    return mac_verify(ks.flow_mac_key(rrep.source, rrep.destination),
                      pr_mac_bytes(rrep.p_r, rrep.route_id), rrep.mac_tag);
}

void Node::on_rrep(NetCtx& ctx, NodeId from, const Packet& p, bool via_tunnel) {
    if (attacker_ && attacker_->kind == AttackKind::wormhole) {
        wormhole_on_rrep(ctx, p, via_tunnel);
        return;
    }
    if (attacker_ && attacker_->kind == AttackKind::blackhole) return;

    auto it = std::find(p.route.begin(), p.route.end(), id_);
    if (it == p.route.end()) return;
    std::size_t pos = static_cast<std::size_t>(it - p.route.begin());
    if (pos + 1 >= p.route.size()) return; // destination hears its own reply

    if (anct_enabled()) {
        if (anct_.is_malicious(from)) return; // excluded: no relay, no re-evaluation

        bool ok = verify_rrep(ctx, p, pos, from);
        if (!ok) {
            trust_step(ctx, from, -ctx.config().delta1_units);
            return; // dropped; a forged reply's P_R is worthless for SR
        }
        trust_step(ctx, from, +ctx.config().delta1_units);

        // Eq. 2 on the vouching neighbor, over this node's tally window.
        FlowKey flow{p.source, p.destination};
        if (p.p_r > 0) {
            std::uint64_t tallied = flow_tally_[flow][from];
            double sr = static_cast<double>(tallied) / static_cast<double>(p.p_r);
            record_sr(ctx, from, sr);
            if (sr < ctx.config().cfg.s_min)
                trust_step(ctx, from, -ctx.config().delta2_units);
        }
        flow_tally_.erase(flow); // window closes with the reply
    }

    if (pos == 0) {
        // Source: resolve the discovery this reply answers.
        auto dit = discovery_.find(p.destination);
        if (dit == discovery_.end()) return;
        DiscoveryState& disc = dit->second;
        if (disc.resolved || disc.route_id != p.route_id) return; // stale or duplicate

        disc.resolved = true;
        disc.waiting_rrep = false;
        disc.retries_done = 0;
        RouteEntry r;
        r.destination = p.destination;
        r.next_hop = p.route[1];
        r.full_path = p.route;
        r.route_id = p.route_id;
        r.established_at = ctx.now();
        r.valid = true;
        routes_[p.destination] = r;
        flush_pending(ctx, p.destination);
        return;
    }

    // Intermediate: install forwarding state, countersign, relay.
    RouteEntry r;
    r.destination = p.destination;
    r.next_hop = p.route[pos + 1];
    r.full_path = p.route;
    r.route_id = p.route_id;
    r.established_at = ctx.now();
    r.valid = true;
    routes_[p.destination] = r;

    Packet fwd = p;
    fwd.originator_of_hop = id_;
    fwd.signatures.push_back(ctx.keys().sign(id_, rrep_body_bytes(fwd)));
    ctx.unicast(id_, p.route[pos - 1], fwd);
}

// ------------------------------------------------------------------
// Data path

void Node::send_data(NetCtx& ctx, NodeId dest, std::uint32_t seq,
                     const std::vector<std::uint8_t>& payload) {
    auto rit = routes_.find(dest);
    if (rit != routes_.end() && rit->second.valid) {
        RouteEntry& r = rit->second;
        if (anct_enabled() && anct_.is_malicious(r.next_hop)) {
            r.valid = false;
        } else if (!ctx.link_up(id_, r.next_hop)) {
            r.valid = false;
        } else {
            transmit_data(ctx, r, seq, payload);
            return;
        }
    }
    pending_[dest].push_back(PendingData{seq, payload});
    ensure_discovery(ctx, dest);
}

void Node::transmit_data(NetCtx& ctx, const RouteEntry& route, std::uint32_t seq,
                         const std::vector<std::uint8_t>& plaintext) {
    Packet p;
    p.kind = PacketKind::Data;
    p.seq = seq;
    p.source = id_;
    p.destination = route.destination;
    p.originator_of_hop = id_;
    p.route_id = route.route_id;

    const KeyStore& ks = ctx.keys();
    AesCipher cipher(ks.link_cipher_key(id_, route.next_hop));
    p.payload = ctr_encrypt(cipher, frame_counter(p.route_id, seq), plaintext);
    p.has_mac = true;
    p.mac_tag = mac_compute(ks.link_mac_key(id_, route.next_hop), data_mac_bytes(p));

    ctx.unicast(id_, route.next_hop, p);
}

void Node::flush_pending(NetCtx& ctx, NodeId dest) {
    auto pit = pending_.find(dest);
    if (pit == pending_.end()) return;
    std::deque<PendingData> work;
    work.swap(pit->second);
    for (auto& pd : work) send_data(ctx, dest, pd.seq, pd.payload);
}

void Node::on_data(NetCtx& ctx, NodeId from, const Packet& p) {
    count_frame(ctx, from, p);
    FlowKey flow{p.source, p.destination};

    if (attacker_ && (attacker_->kind == AttackKind::blackhole ||
                      attacker_->kind == AttackKind::wormhole)) {
        ctx.data_dropped(flow, p.seq, DropCause::attacker, id_);
        return;
    }

    if (anct_enabled() && anct_.is_malicious(from)) {
        ctx.data_dropped(flow, p.seq, DropCause::no_route, std::nullopt);
        return;
    }

    const KeyStore& ks = ctx.keys();
    if (anct_enabled()) {
        if (!p.has_mac ||
            !mac_verify(ks.link_mac_key(from, id_), data_mac_bytes(p), p.mac_tag)) {
            ctx.data_dropped(flow, p.seq, DropCause::link_loss, std::nullopt);
            return; // discarded, though the reception was counted above
        }
    }

    AesCipher up_cipher(ks.link_cipher_key(from, id_));
    std::vector<std::uint8_t> plaintext =
        ctr_decrypt(up_cipher, frame_counter(p.route_id, p.seq), p.payload);

    if (id_ == p.destination) {
        epochs_[p.source].p_r += 1; // data feeds the flow's epoch too
        ctx.data_delivered(flow, p.seq, plaintext);
        return;
    }

    auto rit = routes_.find(p.destination);
    if (rit == routes_.end() || !rit->second.valid) {
        ctx.data_dropped(flow, p.seq, DropCause::no_route, std::nullopt);
        return;
    }
    RouteEntry& r = rit->second;
    if (anct_enabled() && anct_.is_malicious(r.next_hop)) {
        r.valid = false;
        ctx.data_dropped(flow, p.seq, DropCause::no_route, std::nullopt);
        return;
    }
    if (!ctx.link_up(id_, r.next_hop)) {
        r.valid = false; // the source hears about it at its next timeout
        ctx.data_dropped(flow, p.seq, DropCause::no_route, std::nullopt);
        return;
    }

    // Hop-by-hop re-wrap: decrypt under the upstream link key happened
    // above; re-encrypt and re-MAC under the downstream link key.
    Packet fwd = p;
    fwd.originator_of_hop = id_;
    AesCipher down_cipher(ks.link_cipher_key(id_, r.next_hop));
    fwd.payload = ctr_encrypt(down_cipher, frame_counter(p.route_id, p.seq), plaintext);
    fwd.mac_tag = mac_compute(ks.link_mac_key(id_, r.next_hop), data_mac_bytes(fwd));
    ctx.unicast(id_, r.next_hop, fwd);
}

// ------------------------------------------------------------------
// Discovery lifecycle

void Node::ensure_discovery(NetCtx& ctx, NodeId dest) {
    auto it = discovery_.find(dest);
    if (it != discovery_.end()) {
        DiscoveryState& d = it->second;
        if (!d.resolved && (d.waiting_rrep || d.backing_off)) return; // already in progress
        if (d.resolved) {
            auto rit = routes_.find(dest);
            if (rit != routes_.end() && rit->second.valid) return;
        }
    }
    initiate_discovery(ctx, dest);
}

void Node::initiate_discovery(NetCtx& ctx, NodeId dest) {
    std::uint32_t route_id = ++route_id_counter_[dest]; // R_1, R_2, ...
    std::uint32_t seq = ++next_rreq_seq_;

    DiscoveryState d;
    d.source = id_;
    d.destination = dest;
    d.route_id = route_id;
    d.rreq_seq = seq;
    d.deadline = ctx.now() + ctx.config().rrep_timeout();
    d.resolved = false;
    d.waiting_rrep = true;
    if (auto it = discovery_.find(dest); it != discovery_.end())
        d.retries_done = it->second.retries_done;
    discovery_[dest] = d;

    Packet rreq;
    rreq.kind = PacketKind::Rreq;
    rreq.seq = seq;
    rreq.source = id_;
    rreq.destination = dest;
    rreq.originator_of_hop = id_;
    rreq.route_id = route_id;
    rreq.hop_record = {id_};

    ctx.broadcast(id_, eligible_neighbors(ctx), rreq);
    ctx.schedule_discovery_timeout(id_, dest, route_id, d.deadline);
}

void Node::on_discovery_timeout(NetCtx& ctx, NodeId dest, std::uint32_t route_id) {
    auto it = discovery_.find(dest);
    if (it == discovery_.end()) return;
    DiscoveryState& d = it->second;
    if (d.resolved || d.route_id != route_id) return; // answered or superseded

    d.waiting_rrep = false;
    if (d.retries_done < ctx.config().cfg.max_retries) {
        d.retries_done += 1;
        initiate_discovery(ctx, dest); // R_{n+1}, back to back
        return;
    }
    // Retries exhausted: pause, then the discovery restarts fresh.
    d.retries_done = 0;
    d.backing_off = true;
    ctx.schedule_discovery_restart(id_, dest, ctx.now() + ctx.config().backoff());
}

void Node::on_discovery_restart(NetCtx& ctx, NodeId dest) {
    auto it = discovery_.find(dest);
    if (it == discovery_.end()) return;
    DiscoveryState& d = it->second;
    d.backing_off = false;
    if (d.resolved) return;
    auto pit = pending_.find(dest);
    if (pit == pending_.end() || pit->second.empty()) return; // nothing waiting
    initiate_discovery(ctx, dest);
}

void Node::drop_all_pending(NetCtx& ctx) {
    for (auto& [dest, q] : pending_) {
        for (auto& pd : q)
            ctx.data_dropped(FlowKey{id_, dest}, pd.seq, DropCause::no_route, std::nullopt);
        q.clear();
    }
}

// ------------------------------------------------------------------
// Attacker behaviors

// Fake reply claiming a route through the attacker, one per distinct
// RREQ: forged destination signature under the attacker's own key (so
// it cannot survive verification against the real one), p_r guessed
// as 1, fabricated high sequence baked into the reply.
void Node::blackhole_on_rreq(NetCtx& ctx, NodeId from, const Packet& p) {
    auto key = std::make_pair(p.source, p.seq);
    if (seen_rreq_.count(key)) return;
    seen_rreq_.insert(key);

    Packet rrep;
    rrep.kind = PacketKind::Rrep;
    rrep.source = p.source;
    rrep.destination = p.destination;
    rrep.originator_of_hop = id_;
    rrep.route_id = p.route_id;
    rrep.route = p.hop_record;
    if (std::find(rrep.route.begin(), rrep.route.end(), id_) == rrep.route.end())
        rrep.route.push_back(id_);
    if (rrep.route.back() != p.destination) rrep.route.push_back(p.destination);
    rrep.p_r = 1;

    const KeyStore& ks = ctx.keys();
    auto body = rrep_body_bytes(rrep);
    rrep.has_mac = true;
    rrep.mac_tag = mac_compute(ks.link_mac_key(id_, id_), pr_mac_bytes(rrep.p_r, rrep.route_id));
    Signature forged = ks.sign(id_, body);
    forged.signer = p.destination; // claims to be the destination's signature
    rrep.signatures.push_back(forged);

    ctx.unicast(id_, from, rrep);
}

void Node::wormhole_on_rreq(NetCtx& ctx, const Packet& p, bool via_tunnel) {
    auto key = std::make_pair(p.source, p.seq);
    if (seen_rreq_.count(key)) return;
    seen_rreq_.insert(key);

    if (std::find(p.hop_record.begin(), p.hop_record.end(), id_) != p.hop_record.end()) return;

    Packet fwd = p;
    fwd.hop_record.push_back(id_);
    fwd.originator_of_hop = id_;
    // Requests received over the air also race down the tunnel; tunneled
    // ones are only rebroadcast locally (no ping-pong).
    if (!via_tunnel && attacker_->partner) ctx.tunnel(id_, *attacker_->partner, fwd);
    ctx.broadcast(id_, ctx.neighbors_of(id_), fwd);
}

// Replies are relayed without countersigning: the tunnel is a covert
// repeater, not a protocol participant.
void Node::wormhole_on_rrep(NetCtx& ctx, const Packet& p, bool via_tunnel) {
    auto it = std::find(p.route.begin(), p.route.end(), id_);
    if (it == p.route.end() || it == p.route.begin()) return;
    std::size_t pos = static_cast<std::size_t>(it - p.route.begin());

    Packet fwd = p;
    fwd.originator_of_hop = id_;
    NodeId prev = p.route[pos - 1];
    if (!via_tunnel && attacker_->partner && prev == *attacker_->partner) {
        ctx.tunnel(id_, prev, fwd);
    } else {
        ctx.unicast(id_, prev, fwd);
    }
}

void Node::flood_tick(NetCtx& ctx, Rng& rng) {
    // Junk request aimed at a destination that is not in the network.
    Packet rreq;
    rreq.kind = PacketKind::Rreq;
    rreq.seq = ++next_rreq_seq_;
    rreq.source = id_;
    rreq.destination = ctx.config().cfg.node_count +
                       static_cast<NodeId>(rng.below(1000));
    rreq.originator_of_hop = id_;
    rreq.route_id = 1;
    rreq.hop_record = {id_};
    ctx.broadcast(id_, ctx.neighbors_of(id_), rreq);
}

} // namespace anct
