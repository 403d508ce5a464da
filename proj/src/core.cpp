#include "anct/types.hpp"

#include <cmath>

namespace anct {

SimTime SimTime::from_seconds(double s) {
    return SimTime{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::string to_string(AttackKind k) {
    switch (k) {
        case AttackKind::none: return "none";
        case AttackKind::blackhole: return "blackhole";
        case AttackKind::flooding: return "flooding";
        case AttackKind::wormhole: return "wormhole";
    }
    return "none";
}

std::string to_string(Protocol p) {
    return p == Protocol::anct ? "anct" : "baseline_aodv";
}

bool attack_kind_from_string(const std::string& s, AttackKind& out) {
    if (s == "none") out = AttackKind::none;
    else if (s == "blackhole") out = AttackKind::blackhole;
    else if (s == "flooding") out = AttackKind::flooding;
    else if (s == "wormhole") out = AttackKind::wormhole;
    else return false;
    return true;
}

bool protocol_from_string(const std::string& s, Protocol& out) {
    if (s == "anct") out = Protocol::anct;
    else if (s == "baseline_aodv") out = Protocol::baseline_aodv;
    else return false;
    return true;
}

} // namespace anct
