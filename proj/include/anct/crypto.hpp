#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <memory>
#include <vector>

#include "anct/types.hpp"

namespace anct {

// 128-bit cipher block.
using Block = std::array<std::uint8_t, 16>;

inline Block block_xor(const Block& a, const Block& b) {
    Block r;
    for (int i = 0; i < 16; ++i) r[i] = a[i] ^ b[i];
    return r;
}

// 128-bit unsigned counter with wraparound modulo 2^128.
struct Counter128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    Counter128 plus(std::uint64_t n) const {
        Counter128 r = *this;
        std::uint64_t old = r.lo;
        r.lo += n;
        if (r.lo < old) ++r.hi; // carry
        return r;
    }

    // Big-endian encoding: the counter is the block's integer value.
    Block to_block() const {
        Block b{};
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(hi >> (56 - 8 * i));
        for (int i = 0; i < 8; ++i) b[8 + i] = static_cast<std::uint8_t>(lo >> (56 - 8 * i));
        return b;
    }
    static Counter128 from_block(const Block& b) {
        Counter128 c;
        for (int i = 0; i < 8; ++i) c.hi = (c.hi << 8) | b[i];
        for (int i = 0; i < 8; ++i) c.lo = (c.lo << 8) | b[8 + i];
        return c;
    }

    bool operator==(const Counter128&) const = default;
};

// Keyed permutation over 16-byte blocks. Deliberately exposes only the
// forward direction: counter mode never inverts the cipher.
class BlockCipher {
public:
    virtual ~BlockCipher() = default;
    virtual Block encrypt_block(const Block& in) const = 0;
    virtual std::unique_ptr<BlockCipher> clone() const = 0;
};

// E_K(B) = B xor K. Trivial cipher for hand-checkable keystream math.
class XorCipher final : public BlockCipher {
public:
    explicit XorCipher(const Block& key) : key_(key) {}
    Block encrypt_block(const Block& in) const override { return block_xor(in, key_); }
    std::unique_ptr<BlockCipher> clone() const override { return std::make_unique<XorCipher>(key_); }

private:
    Block key_;
};

// E_K(B) = rotl128(B xor K, 13) xor K. Fully specified test cipher with
// frozen vectors in the test suite; a bijection, but not secure.
class SimTestCipher final : public BlockCipher {
public:
    explicit SimTestCipher(const Block& key) : key_(key) {}
    Block encrypt_block(const Block& in) const override;
    std::unique_ptr<BlockCipher> clone() const override { return std::make_unique<SimTestCipher>(key_); }

private:
    Block key_;
};

// AES-128, encryption direction only (counter mode needs nothing else).
class AesCipher final : public BlockCipher {
public:
    explicit AesCipher(const Block& key);
    Block encrypt_block(const Block& in) const override;
    std::unique_ptr<BlockCipher> clone() const override;

private:
    std::array<std::uint32_t, 44> round_keys_;
};

// ------------------------------------------------------------------
// Counter mode. Keystream block i (1-based) is E_K(C + i - 1); the
// keystream is a pure function of (key, counter) and can be computed
// before any plaintext exists.

std::vector<Block> ctr_keystream(const BlockCipher& cipher, Counter128 c, std::size_t n_blocks);

std::vector<std::uint8_t> ctr_encrypt(const BlockCipher& cipher, Counter128 c,
                                      const std::uint8_t* data, std::size_t len);

inline std::vector<std::uint8_t> ctr_encrypt(const BlockCipher& cipher, Counter128 c,
                                             const std::vector<std::uint8_t>& pt) {
    return ctr_encrypt(cipher, c, pt.data(), pt.size());
}

// Identical code path to encryption; there is no inverse to call.
inline std::vector<std::uint8_t> ctr_decrypt(const BlockCipher& cipher, Counter128 c,
                                             const std::vector<std::uint8_t>& ct) {
    return ctr_encrypt(cipher, c, ct.data(), ct.size());
}

// Random access: decrypt block `block_index` (1-based) alone.
Block ctr_decrypt_block(const BlockCipher& cipher, Counter128 c,
                        std::size_t block_index, const Block& ct_block);

// ------------------------------------------------------------------
// Keyed MAC and simulation-grade signatures. Both are truncated keyed
// hashes (SHA-256 over key || message, first 16 bytes); signatures are
// the same construction under a per-node secret with verification done
// through the key store's oracle.

using MacKey = std::array<std::uint8_t, 16>;
using MacTag = std::array<std::uint8_t, 16>;

MacTag mac_compute(const MacKey& key, const std::uint8_t* msg, std::size_t len);
bool mac_verify(const MacKey& key, const std::uint8_t* msg, std::size_t len, const MacTag& tag);

inline MacTag mac_compute(const MacKey& key, const std::vector<std::uint8_t>& m) {
    return mac_compute(key, m.data(), m.size());
}
inline bool mac_verify(const MacKey& key, const std::vector<std::uint8_t>& m, const MacTag& tag) {
    return mac_verify(key, m.data(), m.size(), tag);
}

struct Signature {
    NodeId signer = 0;
    MacTag tag{};

    bool operator==(const Signature&) const = default;
};

// ------------------------------------------------------------------
// Central key store. All keys are derived deterministically from the
// scenario seed so runs are reproducible. Immutable after construction.
class KeyStore {
public:
    KeyStore(std::uint64_t seed, std::uint32_t node_count);

    // Pairwise link keys (unordered node pair).
    MacKey link_cipher_key(NodeId a, NodeId b) const;
    MacKey link_mac_key(NodeId a, NodeId b) const;
    // End-to-end MAC key shared by a flow's endpoints (ordered pair).
    MacKey flow_mac_key(NodeId source, NodeId destination) const;

    Signature sign(NodeId signer, const std::uint8_t* msg, std::size_t len) const;
    bool verify_sig(const std::uint8_t* msg, std::size_t len, const Signature& sig) const;

    Signature sign(NodeId signer, const std::vector<std::uint8_t>& m) const {
        return sign(signer, m.data(), m.size());
    }
    bool verify_sig(const std::vector<std::uint8_t>& m, const Signature& sig) const {
        return verify_sig(m.data(), m.size(), sig);
    }

    std::uint32_t node_count() const { return node_count_; }

private:
    MacKey derive(const char* label, std::uint64_t a, std::uint64_t b) const;
    MacKey signing_key(NodeId n) const;

    std::uint64_t seed_;
    std::uint32_t node_count_;
};

} // namespace anct
