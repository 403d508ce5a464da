#include "anct/packet.hpp"

namespace anct {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (24 - 8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (56 - 8 * i)));
}

std::vector<std::uint8_t> pr_mac_bytes(std::uint64_t p_r, std::uint32_t route_id) {
    std::vector<std::uint8_t> out;
    out.reserve(12);
    put_u64(out, p_r);
    put_u32(out, route_id);
    return out;
}

std::vector<std::uint8_t> rrep_body_bytes(const Packet& rrep) {
    std::vector<std::uint8_t> out;
    out.reserve(24 + 4 * rrep.route.size());
    put_u32(out, rrep.source);
    put_u32(out, rrep.destination);
    put_u32(out, rrep.route_id);
    put_u64(out, rrep.p_r);
    put_u32(out, static_cast<std::uint32_t>(rrep.route.size()));
    for (NodeId n : rrep.route) put_u32(out, n);
    return out;
}

std::vector<std::uint8_t> data_mac_bytes(const Packet& data) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + data.payload.size());
    put_u32(out, data.source);
    put_u32(out, data.destination);
    put_u32(out, data.seq);
    put_u32(out, data.route_id);
    out.insert(out.end(), data.payload.begin(), data.payload.end());
    return out;
}

} // namespace anct
