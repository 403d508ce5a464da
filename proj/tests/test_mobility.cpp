#include <doctest.h>

#include <cmath>

#include "anct/mobility.hpp"

using namespace anct;

namespace {

ValidatedConfig make_cfg(std::uint32_t nodes, double speed, double pause) {
    ScenarioConfig c;
    c.node_count = nodes;
    c.speed = speed;
    c.pause_time = pause;
    ValidatedConfig vc;
    std::string err;
    REQUIRE(validate_config(c, vc, err));
    return vc;
}

} // namespace

TEST_CASE("init_positions: deterministic, in-bounds, one state per node") {
    auto cfg = make_cfg(100, 10, 5);
    Rng r1(99, rng_stream::mobility);
    Rng r2(99, rng_stream::mobility);
    auto a = init_positions(cfg, r1);
    auto b = init_positions(cfg, r2);
    REQUIRE(a.size() == 100);
    REQUIRE(b.size() == 100);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].current == b[i].current);
        CHECK(a[i].target == b[i].target);
        CHECK(a[i].current.x >= 0.0);
        CHECK(a[i].current.x <= 1000.0);
        CHECK(a[i].current.y >= 0.0);
        CHECK(a[i].current.y <= 1000.0);
    }
}

TEST_CASE("advance: straight-line motion at the configured speed") {
    auto cfg = make_cfg(2, 10, 5);
    Rng rng(1, rng_stream::mobility);
    WaypointState s;
    s.node = 0;
    s.current = {0, 0};
    s.leg_start = {0, 0};
    s.leg_start_time = 0.0;
    s.target = {100, 0};
    s.speed = 10.0;

    advance(s, 0.0, 5.0, cfg, rng);
    CHECK(s.current.x == doctest::Approx(50.0));
    CHECK(s.current.y == doctest::Approx(0.0));

    // zero-length window changes nothing
    WaypointState before = s;
    advance(s, 5.0, 5.0, cfg, rng);
    CHECK(s.current == before.current);
    CHECK(s.paused == before.paused);
}

TEST_CASE("advance: arrival parks at the target through the pause window") {
    auto cfg = make_cfg(2, 10, 5);
    Rng rng(1, rng_stream::mobility);
    WaypointState s;
    s.node = 0;
    s.current = {0, 0};
    s.leg_start = {0, 0};
    s.leg_start_time = 0.0;
    s.target = {10, 0};
    s.speed = 10.0;

    // arrival at t = 1 s; the 8 s window parks the node and opens the
    // pause, with no fresh target drawn yet
    advance(s, 0.0, 8.0, cfg, rng);
    CHECK(s.current.x == doctest::Approx(10.0));
    CHECK(s.paused);
    CHECK(s.pause_until == doctest::Approx(6.0)); // arrival + 5
    CHECK(s.target.x == doctest::Approx(10.0));   // no new target yet

    // a later window past the pause draws the next waypoint and moves
    advance(s, 8.0, 8.1, cfg, rng);
    CHECK_FALSE(s.paused);
}

TEST_CASE("advance composition is exact when no redraw occurs") {
    auto cfg = make_cfg(2, 7, 5);
    Rng rng_a(5, rng_stream::mobility);
    Rng rng_b(5, rng_stream::mobility);

    WaypointState one;
    one.current = {13.5, 20.25};
    one.leg_start = one.current;
    one.leg_start_time = 0.0;
    one.target = {900.0, 650.0};
    one.speed = 7.0;
    WaypointState two = one;

    advance(one, 0.0, 9.0, cfg, rng_a);

    advance(two, 0.0, 2.5, cfg, rng_b);
    advance(two, 2.5, 6.0, cfg, rng_b);
    advance(two, 6.0, 9.0, cfg, rng_b);

    // bit-identical, not just approximately equal
    CHECK(one.current.x == two.current.x);
    CHECK(one.current.y == two.current.y);
}

TEST_CASE("positions stay in bounds over long random runs") {
    auto cfg = make_cfg(10, 30, 1);
    Rng rng(123, rng_stream::mobility);
    auto states = init_positions(cfg, rng);
    double t = 0.0;
    for (int tick = 0; tick < 3000; ++tick) {
        double next = t + 0.1;
        for (auto& s : states) {
            advance(s, t, next, cfg, rng);
            CHECK(s.current.x >= 0.0);
            CHECK(s.current.x <= 1000.0);
            CHECK(s.current.y >= 0.0);
            CHECK(s.current.y <= 1000.0);
        }
        t = next;
    }
}

TEST_CASE("mean moving speed matches the configured speed within 1%") {
    auto cfg = make_cfg(4, 20, 0); // no pauses: every tick is travel time
    Rng rng(77, rng_stream::mobility);
    auto states = init_positions(cfg, rng);
    double t = 0.0;
    double path = 0.0;
    double elapsed = 0.0;
    const double tick = 0.1;
    for (int k = 0; k < 20000; ++k) {
        for (auto& s : states) {
            Position before = s.current;
            advance(s, t, t + tick, cfg, rng);
            path += distance(before, s.current);
        }
        elapsed += tick * states.size();
        t += tick;
    }
    double mean_speed = path / elapsed;
    CHECK(mean_speed == doctest::Approx(20.0).epsilon(0.01));
}

TEST_CASE("adjacency matches a brute-force pairwise check") {
    auto cfg = make_cfg(20, 10, 5);
    Rng rng(31337, rng_stream::mobility);
    auto states = init_positions(cfg, rng);
    std::vector<std::pair<NodeId, Position>> pos;
    for (const auto& s : states) pos.emplace_back(s.node, s.current);

    auto adj = neighbors(pos, 250.0);
    for (NodeId a = 0; a < 20; ++a) {
        CHECK_FALSE(adj.adjacent(a, a)); // irreflexive
        for (NodeId b = 0; b < 20; ++b) {
            if (a == b) continue;
            bool expect = distance(pos[a].second, pos[b].second) <= 250.0;
            CHECK(adj.adjacent(a, b) == expect);
            CHECK(adj.adjacent(a, b) == adj.adjacent(b, a)); // symmetric
        }
    }
}

TEST_CASE("adjacency boundary: exactly at range is in, just beyond is out") {
    std::vector<std::pair<NodeId, Position>> pos = {
        {0, {0, 0}},
        {1, {250.0, 0}},
        {2, {250.0001, 0}},
    };
    auto adj = neighbors(pos, 250.0);
    CHECK(adj.adjacent(0, 1));
    CHECK_FALSE(adj.adjacent(0, 2));
}
