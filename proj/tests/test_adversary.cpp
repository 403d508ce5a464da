#include <doctest.h>

#include <algorithm>
#include <set>

#include "anct/engine.hpp"
#include "script_ctx.hpp"

using namespace anct;
using anct::test::ScriptCtx;
using anct::test::script_config;

namespace {

ValidatedConfig engine_config(std::function<void(ScenarioConfig&)> tweak) {
    ScenarioConfig c;
    tweak(c);
    ValidatedConfig vc;
    std::string err;
    REQUIRE_MESSAGE(validate_config(c, vc, err), err);
    return vc;
}

} // namespace

TEST_CASE("blackhole answers each distinct request once, with a forged reply") {
    auto cfg = script_config(4);
    ScriptCtx ctx(cfg);
    // S=0, M=1 (blackhole), D=2
    ctx.link(0, 1);
    ctx.link(1, 2);
    ctx.nodes[1].set_attacker(AttackerProfile{1, AttackKind::blackhole, {}, 0});

    Packet rreq;
    rreq.kind = PacketKind::Rreq;
    rreq.seq = 1;
    rreq.source = 0;
    rreq.destination = 2;
    rreq.route_id = 1;
    rreq.hop_record = {0};
    ctx.nodes[1].on_frame(ctx, 0, rreq, false);

    REQUIRE(ctx.wire.size() == 1);
    const Packet& forged = ctx.wire.front().packet;
    CHECK(ctx.wire.front().to == 0);
    CHECK(forged.kind == PacketKind::Rrep);
    CHECK(forged.route == std::vector<NodeId>{0, 1, 2}); // claims to sit on the path
    CHECK(forged.p_r == 1);
    REQUIRE(forged.signatures.size() == 1);
    CHECK(forged.signatures[0].signer == 2); // claims the destination signed it
    // but the tag cannot verify under the destination's real key
    CHECK_FALSE(ctx.keys().verify_sig(rrep_body_bytes(forged), forged.signatures[0]));

    // a duplicate copy of the same request gets no second reply
    ctx.wire.clear();
    ctx.nodes[1].on_frame(ctx, 0, rreq, false);
    CHECK(ctx.wire.empty());
    // and it never rebroadcasts the request
    CHECK(ctx.broadcasts.empty());
}

TEST_CASE("blackhole destroys data routed through it") {
    auto cfg = script_config(3);
    ScriptCtx ctx(cfg);
    ctx.link_chain({0, 1, 2});
    ctx.nodes[1].set_attacker(AttackerProfile{1, AttackKind::blackhole, {}, 0});

    Packet d;
    d.kind = PacketKind::Data;
    d.source = 0;
    d.destination = 2;
    d.seq = 4;
    d.route_id = 1;
    d.payload.assign(64, 0x3c);
    d.has_mac = true;
    d.mac_tag = mac_compute(ctx.keys().link_mac_key(0, 1), data_mac_bytes(d));

    ctx.nodes[1].on_frame(ctx, 0, d, false);
    REQUIRE(ctx.drops.size() == 1);
    CHECK(ctx.drops[0].cause == DropCause::attacker);
    CHECK(ctx.drops[0].attacker == NodeId{1});
    CHECK(ctx.wire.empty());
    // the reception still fed the forward counter
    CHECK(ctx.nodes[1].anct().entries.at(0).fc == 1);
}

TEST_CASE("wormhole endpoints tunnel requests and relay replies unsigned") {
    auto cfg = script_config(6);
    ScriptCtx ctx(cfg);
    // 0=S, 1=Wa, 2=Wb, 3=D; Wa near S, Wb near D, no other connectivity
    ctx.link(0, 1);
    ctx.link(2, 3);
    ctx.nodes[1].set_attacker(AttackerProfile{1, AttackKind::wormhole, NodeId{2}, 0});
    ctx.nodes[2].set_attacker(AttackerProfile{2, AttackKind::wormhole, NodeId{1}, 0});

    Packet rreq;
    rreq.kind = PacketKind::Rreq;
    rreq.seq = 3;
    rreq.source = 0;
    rreq.destination = 3;
    rreq.route_id = 1;
    rreq.hop_record = {0};

    ctx.nodes[1].on_frame(ctx, 0, rreq, false);
    // Wa appended itself and pushed the copy down the tunnel
    REQUIRE_FALSE(ctx.wire.empty());
    bool tunneled = false;
    for (const auto& s : ctx.wire)
        if (s.tunneled && s.from == 1 && s.to == 2) tunneled = true;
    CHECK(tunneled);
    ctx.pump();

    // the destination heard the request with both endpoints on the path
    REQUIRE(ctx.rrep_windows.size() == 1);
    ctx.advance_now(0.05);
    ctx.fire_due_windows();

    // the reply came back through the tunnel without countersignatures:
    // only the destination's signature is aboard when it reaches S
    const Packet* at_source = nullptr;
    for (const auto& s : ctx.log)
        if (s.to == 0 && s.packet.kind == PacketKind::Rrep) at_source = &s.packet;
    REQUIRE(at_source != nullptr);
    CHECK(at_source->route == std::vector<NodeId>{0, 1, 2, 3});
    CHECK(at_source->signatures.size() == 1); // D only; Wa/Wb signed nothing

    // under the trust protocol that chain is incomplete: S refuses it
    CHECK(ctx.nodes[0].routes().count(3) == 0);
    CHECK(ctx.nodes[0].anct().entries.at(1).tc_units == 900000);
}

TEST_CASE("flooder emits junk requests at nonexistent destinations") {
    auto cfg = script_config(3);
    ScriptCtx ctx(cfg);
    ctx.link(2, 1);
    ctx.nodes[2].set_attacker(AttackerProfile{2, AttackKind::flooding, {}, 100.0});

    Rng rng(1, rng_stream::adversary);
    for (int i = 0; i < 10; ++i) ctx.nodes[2].flood_tick(ctx, rng);

    REQUIRE(ctx.broadcasts.size() == 10);
    std::set<std::uint32_t> seqs;
    while (!ctx.wire.empty()) {
        auto s = ctx.wire.front();
        ctx.wire.pop_front();
        CHECK(s.packet.kind == PacketKind::Rreq);
        CHECK(s.packet.destination >= 3); // not part of the network
        seqs.insert(s.packet.seq);
    }
    CHECK(seqs.size() == 10); // each burst is a fresh request
}

// ------------------------------------------------------------------
// Engine-level traces on pinned topologies.

TEST_CASE("4-node blackhole trace: baseline captured, trust protocol immune") {
    // S=0, M=1 (blackhole, adjacent to S), A=2, D=3; honest path 0-2-3
    auto positions = std::vector<Position>{{0, 0}, {100, 0}, {200, 0}, {400, 0}};
    auto base = [&](ScenarioConfig& c) {
        c.node_count = 4;
        c.flow_pairs = {{0, 3}};
        c.sim_duration = 10.0;
        c.loss_probability = 0.0;
        c.attack_kind = AttackKind::blackhole;
        c.attacker_count = 1;
    };

    EngineOptions opts;
    opts.fixed_positions = positions;
    opts.attackers = std::vector<AttackerProfile>{{1, AttackKind::blackhole, {}, 0}};

    SUBCASE("baseline: the forged reply wins and the flow dies") {
        auto cfg = engine_config([&](ScenarioConfig& c) {
            base(c);
            c.protocol = Protocol::baseline_aodv;
        });
        Engine eng(cfg, opts);
        Metrics m = eng.run();
        CHECK(m.data_sent == 40); // 4/s for 10 s
        CHECK(eng.node(0).routes().at(3).full_path == std::vector<NodeId>{0, 1, 3});
        CHECK(m.pdr() < 0.1); // the victim flow collapses
        CHECK(m.drops_attacker > 0);
        CHECK(m.data_sent == m.data_delivered + m.total_drops());
    }

    SUBCASE("trust protocol: forged replies are rejected, delivery stays intact") {
        auto cfg = engine_config(base);
        Engine eng(cfg, opts);
        Metrics m = eng.run();
        CHECK(m.data_sent == 40);
        CHECK(eng.node(0).routes().at(3).full_path == std::vector<NodeId>{0, 2, 3});
        CHECK(m.pdr() == doctest::Approx(1.0));
        CHECK(m.drops_attacker == 0);
        // the forger lost trust at the source with every fake reply
        CHECK(eng.node(0).anct().entries.at(1).tc_units < 1000000);
    }
}

TEST_CASE("two flows, attacker on one: only that flow collapses") {
    // flow A: 0 -> 1(blackhole) -> 2 (only path); flow B: 3 -> 4 -> 5, far away
    auto positions = std::vector<Position>{
        {0, 0}, {200, 0}, {400, 0}, {0, 2000}, {200, 2000}, {400, 2000}};
    auto cfg = engine_config([&](ScenarioConfig& c) {
        c.node_count = 6;
        c.flow_pairs = {{0, 2}, {3, 5}};
        c.sim_duration = 10.0;
        c.loss_probability = 0.0;
        c.protocol = Protocol::baseline_aodv;
        c.attack_kind = AttackKind::blackhole;
        c.attacker_count = 1;
    });
    EngineOptions opts;
    opts.fixed_positions = positions;
    opts.attackers = std::vector<AttackerProfile>{{1, AttackKind::blackhole, {}, 0}};

    Engine eng(cfg, opts);
    Metrics m = eng.run();
    const auto& f1 = m.flows.at(FlowKey{0, 2});
    const auto& f2 = m.flows.at(FlowKey{3, 5});
    CHECK(f1.sent == 40);
    CHECK(f1.delivered == 0); // everything routed into the hole
    CHECK(f2.sent == 40);
    CHECK(f2.delivered == 40); // untouched
    CHECK(m.data_sent == m.data_delivered + m.total_drops());
}

TEST_CASE("dumbbell wormhole trace: tunnel wins first arrival") {
    // chain 0..10 with 200 m spacing; Wa=11 near S, Wb=12 near D
    std::vector<Position> positions;
    for (int i = 0; i <= 10; ++i) positions.push_back({200.0 * i, 0});
    positions.push_back({100, 100});  // 11: Wa
    positions.push_back({1900, 100}); // 12: Wb

    auto base = [&](ScenarioConfig& c) {
        c.node_count = 13;
        c.flow_pairs = {{0, 10}};
        c.sim_duration = 30.0;
        c.loss_probability = 0.0;
        c.attack_kind = AttackKind::wormhole;
        c.attacker_count = 2;
    };
    EngineOptions opts;
    opts.fixed_positions = positions;
    opts.attackers = std::vector<AttackerProfile>{
        {11, AttackKind::wormhole, NodeId{12}, 0},
        {12, AttackKind::wormhole, NodeId{11}, 0},
    };

    SUBCASE("baseline: the tunnel route is selected, then swallows the flow") {
        auto cfg = engine_config([&](ScenarioConfig& c) {
            base(c);
            c.protocol = Protocol::baseline_aodv;
        });
        Engine eng(cfg, opts);
        Metrics m = eng.run();
        const auto& path = eng.node(0).routes().at(10).full_path;
        CHECK(std::find(path.begin(), path.end(), NodeId{11}) != path.end());
        CHECK(std::find(path.begin(), path.end(), NodeId{12}) != path.end());
        CHECK(m.pdr() < 0.1);
        CHECK(m.drops_attacker > 0);
    }

    SUBCASE("trust protocol: unsigned tunnel relays get the endpoints excluded") {
        auto cfg = engine_config(base);
        std::vector<TrustEvent> marks;
        EngineOptions o2 = opts;
        o2.hooks.on_trust = [&](const TrustEvent& ev) {
            if (ev.malicious) marks.push_back(ev);
        };
        Engine eng(cfg, o2);
        Metrics m = eng.run();

        // some honest observer marked a tunnel endpoint
        bool endpoint_marked = false;
        for (const auto& ev : marks)
            if ((ev.neighbor == 11 || ev.neighbor == 12) && ev.observer <= 10)
                endpoint_marked = true;
        CHECK(endpoint_marked);

        // after exclusion the honest chain carries the flow
        const auto& path = eng.node(0).routes().at(10).full_path;
        CHECK(std::find(path.begin(), path.end(), NodeId{11}) == path.end());
        CHECK(std::find(path.begin(), path.end(), NodeId{12}) == path.end());
        CHECK(m.data_delivered > m.data_sent / 2);
        CHECK(m.data_sent == m.data_delivered + m.total_drops());
    }
}

TEST_CASE("flooding: junk volume equals rate x duration and inflates overhead") {
    // 0 -> 1 flow, 2 = flooder heard by 1
    auto positions = std::vector<Position>{{0, 0}, {100, 0}, {200, 0}};
    auto base = [&](ScenarioConfig& c) {
        c.node_count = 3;
        c.flow_pairs = {{0, 1}};
        c.sim_duration = 50.0;
        c.loss_probability = 0.0;
    };

    std::uint64_t quiet_bytes = 0;
    {
        auto cfg = engine_config(base);
        EngineOptions opts;
        opts.fixed_positions = positions;
        Engine eng(cfg, opts);
        quiet_bytes = eng.run().control_bytes_sent;
    }

    auto cfg = engine_config([&](ScenarioConfig& c) {
        base(c);
        c.attack_kind = AttackKind::flooding;
        c.attacker_count = 1;
        c.flood_rate = 100.0;
    });
    EngineOptions opts;
    opts.fixed_positions = positions;
    opts.attackers = std::vector<AttackerProfile>{{2, AttackKind::flooding, {}, 100.0}};
    std::set<std::uint32_t> junk_seqs;
    opts.hooks.on_frame_delivered = [&](const FrameEvent& fe) {
        if (fe.kind == PacketKind::Rreq && fe.from == 2 && fe.flow.destination >= 3)
            junk_seqs.insert(fe.seq);
    };
    Engine eng(cfg, opts);
    Metrics m = eng.run();

    CHECK(junk_seqs.size() == 5000); // 100/s for 50 s
    CHECK(m.control_bytes_sent > quiet_bytes);
    CHECK(m.data_sent == m.data_delivered + m.total_drops());
}
