#pragma once

#include <optional>

#include "anct/types.hpp"

namespace anct {

// Attacker role attached to a node. Blackhole nodes answer every RREQ
// with a forged RREP and destroy data routed through them. Flooding
// nodes spray junk RREQs at nonexistent destinations. Wormhole nodes
// come in pairs joined by an out-of-band tunnel (1 us, unbounded
// bandwidth), relay control traffic through it without signing, and
// destroy data routed through them.
struct AttackerProfile {
    NodeId node = 0;
    AttackKind kind = AttackKind::none;
    std::optional<NodeId> partner;  // wormhole peer
    double flood_rate = 0.0;        // junk RREQs/second (flooding only)
};

} // namespace anct
