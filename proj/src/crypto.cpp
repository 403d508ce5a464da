#include "anct/crypto.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace anct {

Block SimTestCipher::encrypt_block(const Block& in) const {
    Counter128 k = Counter128::from_block(key_);
    Counter128 b = Counter128::from_block(in);
    std::uint64_t hi = b.hi ^ k.hi;
    std::uint64_t lo = b.lo ^ k.lo;
    // rotate the 128-bit value left by 13
    Counter128 r;
    r.hi = (hi << 13) | (lo >> 51);
    r.lo = (lo << 13) | (hi >> 51);
    r.hi ^= k.hi;
    r.lo ^= k.lo;
    return r.to_block();
}

std::vector<Block> ctr_keystream(const BlockCipher& cipher, Counter128 c, std::size_t n_blocks) {
    std::vector<Block> out;
    out.reserve(n_blocks);
    for (std::size_t i = 0; i < n_blocks; ++i) {
        out.push_back(cipher.encrypt_block(c.plus(i).to_block()));
    }
    return out;
}

std::vector<std::uint8_t> ctr_encrypt(const BlockCipher& cipher, Counter128 c,
                                      const std::uint8_t* data, std::size_t len) {
    std::vector<std::uint8_t> out(len);
    std::size_t n_blocks = (len + 15) / 16;
    for (std::size_t i = 0; i < n_blocks; ++i) {
        Block ks = cipher.encrypt_block(c.plus(i).to_block());
        std::size_t off = 16 * i;
        std::size_t chunk = len - off < 16 ? len - off : 16;
        for (std::size_t j = 0; j < chunk; ++j) out[off + j] = data[off + j] ^ ks[j];
    }
    return out;
}

Block ctr_decrypt_block(const BlockCipher& cipher, Counter128 c,
                        std::size_t block_index, const Block& ct_block) {
    // block_index is 1-based; touches no other block
    Block ks = cipher.encrypt_block(c.plus(block_index - 1).to_block());
    return block_xor(ct_block, ks);
}

namespace {

// SHA-256 via OpenSSL's one-shot digest (pure, thread-safe).
void sha256(const std::uint8_t* data, std::size_t len, std::uint8_t out[32]) {
    unsigned int out_len = 32;
    if (EVP_Digest(data, len, out, &out_len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("EVP_Digest failed");
    }
}

MacTag truncated_keyed_hash(const MacKey& key, const std::uint8_t* msg, std::size_t len) {
    std::vector<std::uint8_t> buf(key.size() + len);
    std::memcpy(buf.data(), key.data(), key.size());
    if (len) std::memcpy(buf.data() + key.size(), msg, len);
    std::uint8_t digest[32];
    sha256(buf.data(), buf.size(), digest);
    MacTag tag;
    std::memcpy(tag.data(), digest, tag.size());
    return tag;
}

} // namespace

MacTag mac_compute(const MacKey& key, const std::uint8_t* msg, std::size_t len) {
    return truncated_keyed_hash(key, msg, len);
}

bool mac_verify(const MacKey& key, const std::uint8_t* msg, std::size_t len, const MacTag& tag) {
    return mac_compute(key, msg, len) == tag;
}

KeyStore::KeyStore(std::uint64_t seed, std::uint32_t node_count)
    : seed_(seed), node_count_(node_count) {}

MacKey KeyStore::derive(const char* label, std::uint64_t a, std::uint64_t b) const {
    std::uint8_t buf[64];
    std::size_t n = std::strlen(label);
    if (n > 32) n = 32;
    std::memcpy(buf, label, n);
    std::memset(buf + n, 0, 32 - n);
    auto put64 = [&](std::size_t off, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf[off + i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    };
    put64(32, seed_);
    put64(40, a);
    put64(48, b);
    put64(56, 0);
    std::uint8_t digest[32];
    sha256(buf, sizeof buf, digest);
    MacKey k;
    std::memcpy(k.data(), digest, k.size());
    return k;
}

MacKey KeyStore::link_cipher_key(NodeId a, NodeId b) const {
    if (a > b) std::swap(a, b);
    return derive("link-cipher", a, b);
}

MacKey KeyStore::link_mac_key(NodeId a, NodeId b) const {
    if (a > b) std::swap(a, b);
    return derive("link-mac", a, b);
}

MacKey KeyStore::flow_mac_key(NodeId source, NodeId destination) const {
    return derive("flow-mac", source, destination);
}

MacKey KeyStore::signing_key(NodeId n) const {
    return derive("node-sign", n, 0);
}

Signature KeyStore::sign(NodeId signer, const std::uint8_t* msg, std::size_t len) const {
    return Signature{signer, mac_compute(signing_key(signer), msg, len)};
}

bool KeyStore::verify_sig(const std::uint8_t* msg, std::size_t len, const Signature& sig) const {
    return mac_verify(signing_key(sig.signer), msg, len, sig.tag);
}

} // namespace anct
