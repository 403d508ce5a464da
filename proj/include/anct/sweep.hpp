#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anct/config.hpp"
#include "anct/engine.hpp"

namespace anct {

// Cartesian experiment: vary one dimension x seeds x protocols.
struct SweepSpec {
    ScenarioConfig base;
    enum class Vary { attackers, speed } vary = Vary::attackers;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    std::vector<Protocol> protocols;
};

struct RunResult {
    std::uint64_t seed = 0;
    Protocol protocol = Protocol::anct;
    AttackKind attack = AttackKind::none;
    std::uint32_t attackers = 0;
    double speed = 0.0;
    Metrics metrics;
};

// Runs every cell; rows come back in spec order (values x protocols x
// seeds) no matter how many workers execute them.
std::vector<RunResult> run_sweep(const SweepSpec& spec, unsigned workers, std::string& err);

std::string csv_header();
std::string csv_row(const RunResult& r);

// Per-(value, protocol) aggregate over seeds.
struct PointSummary {
    double value = 0.0;
    Protocol protocol = Protocol::anct;
    double mean_pdr = 0.0;
    double min_pdr = 0.0;
    double max_pdr = 0.0;
    double mean_ctrl_bytes = 0.0;
};

std::vector<PointSummary> summarize(const SweepSpec& spec, const std::vector<RunResult>& rows);

} // namespace anct
