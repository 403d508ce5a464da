#pragma once

#include <cstdint>
#include <vector>

#include "anct/crypto.hpp"
#include "anct/types.hpp"

namespace anct {

enum class PacketKind { Rreq, Rrep, Data };

// Frame sizing: fixed 48-byte header for all control frames, plus 8
// bytes per signature entry and 16 bytes per MAC tag. Data frames are
// payload (packet_size bytes) plus the per-hop frame MAC.
inline constexpr std::uint32_t kControlHeaderBytes = 48;
inline constexpr std::uint32_t kSignatureEntryBytes = 8;
inline constexpr std::uint32_t kMacTagBytes = 16;

// One protocol frame: route request, route reply, or data.
struct Packet {
    PacketKind kind = PacketKind::Rreq;
    std::uint32_t seq = 0;               // RREQ id / per-flow data sequence
    NodeId source = 0;                   // flow source S
    NodeId destination = 0;              // flow destination D
    NodeId originator_of_hop = 0;        // link-layer sender of this copy
    std::uint32_t route_id = 0;          // discovery attempt: 1, 2, 3, ...

    std::vector<NodeId> hop_record;      // RREQ: accumulated path, starts [S]
    std::vector<NodeId> route;           // RREP: selected full path S..D

    std::uint64_t p_r = 0;               // RREP: destination's received-packet count
    bool has_mac = false;
    MacTag mac_tag{};                    // RREP: MAC over p_r; Data: frame MAC
    std::vector<Signature> signatures;   // RREP: destination first, then relays

    std::vector<std::uint8_t> payload;   // Data only, CTR-encrypted per hop

    std::uint32_t size_bytes() const {
        if (kind == PacketKind::Data) {
            return static_cast<std::uint32_t>(payload.size()) + (has_mac ? kMacTagBytes : 0);
        }
        return kControlHeaderBytes + (has_mac ? kMacTagBytes : 0) +
               kSignatureEntryBytes * static_cast<std::uint32_t>(signatures.size());
    }
};

// Forwarding state installed from a verified RREP.
struct RouteEntry {
    NodeId destination = 0;
    NodeId next_hop = 0;
    std::vector<NodeId> full_path;       // S..D as carried by the RREP
    std::uint32_t route_id = 0;
    SimTime established_at{};
    bool valid = false;
};

// Canonical byte strings for MAC/signature computation. Big-endian,
// fixed width, so tags are stable across platforms.
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);

// MAC input for the RREP's P_R field: p_r || route_id.
std::vector<std::uint8_t> pr_mac_bytes(std::uint64_t p_r, std::uint32_t route_id);

// Body covered by the RREP signature chain:
// source || destination || route_id || p_r || route.
std::vector<std::uint8_t> rrep_body_bytes(const Packet& rrep);

// Body covered by a data frame's per-hop MAC:
// source || destination || seq || route_id || ciphertext.
std::vector<std::uint8_t> data_mac_bytes(const Packet& data);

// Counter for a data frame: (route_id || seq) in the low 64 bits.
inline Counter128 frame_counter(std::uint32_t route_id, std::uint32_t seq) {
    return Counter128{0, (static_cast<std::uint64_t>(route_id) << 32) | seq};
}

} // namespace anct
