#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anct/types.hpp"

namespace anct {

// Every simulation parameter. Defaults reproduce the reference scenario:
// 100 nodes on a 1000x1000 m area, 250 m radio range, 2 Mbps channel,
// 512-byte packets, 50 s of CBR traffic under random-waypoint motion.
struct ScenarioConfig {
    std::uint32_t node_count = 100;
    double area_width = 1000.0;          // meters
    double area_height = 1000.0;         // meters
    double radio_range = 250.0;          // meters, in-range is distance <= range
    double sim_duration = 50.0;          // seconds
    std::uint64_t channel_capacity = 2'000'000; // bits/second
    std::uint32_t packet_size = 512;     // data payload bytes
    double cbr_rate = 4.0;               // data packets/second per flow
    std::vector<FlowKey> flow_pairs;     // empty = auto (10 random disjoint pairs)
    double speed = 10.0;                 // m/s, single fixed speed per run
    double pause_time = 5.0;             // seconds at each waypoint
    std::uint64_t rng_seed = 1;

    // Trust protocol constants.
    double delta1 = 0.1;                 // trust step on verification outcome
    double delta2 = 0.05;                // trust step on success-ratio shortfall
    double s_min = 0.5;                  // success-ratio threshold, (0,1]
    double t_trust = 0.5;                // below-or-at this trust value => malicious
    double tc_initial = 1.0;             // initial trust for a new neighbor
    double rrep_timeout = 1.0;           // seconds to wait for a route reply

    std::uint32_t attacker_count = 0;
    AttackKind attack_kind = AttackKind::none;
    Protocol protocol = Protocol::anct;

    // Link/engine knobs (exposed so sensitivity can be tested).
    double loss_probability = 0.01;      // per-transmission loss, [0,1]
    double contention_mean_ms = 0.5;     // mean penalty per busy in-range transmitter
    double contention_cap_ms = 20.0;     // penalty cap
    std::uint32_t queue_cap = 50;        // per-node transmit queue limit
    double mobility_tick = 0.1;          // seconds between connectivity refreshes
    std::uint32_t max_retries = 5;       // discovery retries before backoff
    double retry_backoff = 2.0;          // seconds of pause after retries exhausted
    double rrep_collect_window = 0.05;   // destination RREQ collection window, seconds
    double flow_start = 0.0;             // seconds, first CBR injection per flow
    double flood_rate = 50.0;            // junk RREQs/second per flooding attacker

    bool operator==(const ScenarioConfig&) const = default;
};

// A config whose invariants have been checked, with trust constants
// converted to exact integer micro-units (so trust trajectories admit
// closed-form comparison with no float accumulation error).
struct ValidatedConfig {
    ScenarioConfig cfg;

    std::int64_t delta1_units = 0;
    std::int64_t delta2_units = 0;
    std::int64_t t_trust_units = 0;
    std::int64_t tc_initial_units = 0;

    SimTime duration() const { return SimTime::from_seconds(cfg.sim_duration); }
    SimTime rrep_timeout() const { return SimTime::from_seconds(cfg.rrep_timeout); }
    SimTime collect_window() const { return SimTime::from_seconds(cfg.rrep_collect_window); }
    SimTime backoff() const { return SimTime::from_seconds(cfg.retry_backoff); }
};

// Trust values are stored in integer millionths.
std::int64_t trust_units(double v);

struct ConfigError {
    std::string message;
};

// Checks every ScenarioConfig invariant; reports the first violation by
// name ("delta2 must be < delta1", ...).
std::optional<ConfigError> check_config(const ScenarioConfig& cfg);

// check_config + unit conversion. Returns error message on failure.
bool validate_config(const ScenarioConfig& cfg, ValidatedConfig& out, std::string& err);

// Scenario file format: flat `key = value` lines, '#' comments, keys
// exactly matching ScenarioConfig field names. Unknown keys are errors.
bool parse_config_text(const std::string& text, ScenarioConfig& out, std::string& err);
bool load_config_file(const std::string& path, ScenarioConfig& out, std::string& err);
std::string serialize_config(const ScenarioConfig& cfg);

// Applies a single `key=value` override (CLI --set).
bool apply_override(ScenarioConfig& cfg, const std::string& key,
                    const std::string& value, std::string& err);

} // namespace anct
