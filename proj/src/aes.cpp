#include "anct/crypto.hpp"

namespace anct {

// AES-128, forward direction only. The S-box is generated from the
// GF(2^8) field definition instead of a typed-in table; the frozen
// FIPS-197 vectors in the test suite pin the result.
namespace {

struct AesTables {
    std::uint8_t sbox[256];

    AesTables() {
        std::uint8_t exp[256];
        std::uint8_t log[256] = {};
        std::uint8_t x = 1;
        for (int i = 0; i < 256; ++i) {
            exp[i] = x;
            if (i < 255) log[x] = static_cast<std::uint8_t>(i);
            // multiply by the generator 0x03 = x * 2 + x
            std::uint8_t x2 = static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0));
            x = static_cast<std::uint8_t>(x2 ^ x);
        }
        auto rotl8 = [](std::uint8_t v, int k) {
            return static_cast<std::uint8_t>((v << k) | (v >> (8 - k)));
        };
        for (int a = 0; a < 256; ++a) {
            std::uint8_t inv = a == 0 ? 0 : exp[255 - log[a]];
            sbox[a] = static_cast<std::uint8_t>(inv ^ rotl8(inv, 1) ^ rotl8(inv, 2) ^
                                                rotl8(inv, 3) ^ rotl8(inv, 4) ^ 0x63);
        }
    }
};

const AesTables& tables() {
    static const AesTables t;
    return t;
}

inline std::uint8_t xtime(std::uint8_t a) {
    return static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1b : 0));
}

inline std::uint32_t sub_word(std::uint32_t w) {
    const auto& sb = tables().sbox;
    return (static_cast<std::uint32_t>(sb[(w >> 24) & 0xff]) << 24) |
           (static_cast<std::uint32_t>(sb[(w >> 16) & 0xff]) << 16) |
           (static_cast<std::uint32_t>(sb[(w >> 8) & 0xff]) << 8) |
           static_cast<std::uint32_t>(sb[w & 0xff]);
}

inline std::uint32_t rot_word(std::uint32_t w) { return (w << 8) | (w >> 24); }

} // namespace

AesCipher::AesCipher(const Block& key) {
    static const std::uint8_t rcon[10] = {0x01, 0x02, 0x04, 0x08, 0x10,
                                          0x20, 0x40, 0x80, 0x1b, 0x36};
    for (int i = 0; i < 4; ++i) {
        round_keys_[i] = (static_cast<std::uint32_t>(key[4 * i]) << 24) |
                         (static_cast<std::uint32_t>(key[4 * i + 1]) << 16) |
                         (static_cast<std::uint32_t>(key[4 * i + 2]) << 8) |
                         static_cast<std::uint32_t>(key[4 * i + 3]);
    }
    for (int i = 4; i < 44; ++i) {
        std::uint32_t t = round_keys_[i - 1];
        if (i % 4 == 0) {
            t = sub_word(rot_word(t)) ^ (static_cast<std::uint32_t>(rcon[i / 4 - 1]) << 24);
        }
        round_keys_[i] = round_keys_[i - 4] ^ t;
    }
}

Block AesCipher::encrypt_block(const Block& in) const {
    const auto& sb = tables().sbox;
    std::uint8_t st[16];

    // state is column-major: st[4*c + r]
    for (int i = 0; i < 16; ++i) st[i] = in[i];

    auto add_round_key = [&](int round) {
        for (int c = 0; c < 4; ++c) {
            std::uint32_t w = round_keys_[4 * round + c];
            st[4 * c + 0] ^= static_cast<std::uint8_t>(w >> 24);
            st[4 * c + 1] ^= static_cast<std::uint8_t>(w >> 16);
            st[4 * c + 2] ^= static_cast<std::uint8_t>(w >> 8);
            st[4 * c + 3] ^= static_cast<std::uint8_t>(w);
        }
    };
    auto sub_bytes = [&] {
        for (auto& b : st) b = sb[b];
    };
    auto shift_rows = [&] {
        std::uint8_t t;
        // row 1: shift left by 1
        t = st[1]; st[1] = st[5]; st[5] = st[9]; st[9] = st[13]; st[13] = t;
        // row 2: shift left by 2
        std::swap(st[2], st[10]);
        std::swap(st[6], st[14]);
        // row 3: shift left by 3
        t = st[15]; st[15] = st[11]; st[11] = st[7]; st[7] = st[3]; st[3] = t;
    };
    auto mix_columns = [&] {
        for (int c = 0; c < 4; ++c) {
            std::uint8_t* col = st + 4 * c;
            std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
            std::uint8_t all = static_cast<std::uint8_t>(a0 ^ a1 ^ a2 ^ a3);
            col[0] = static_cast<std::uint8_t>(a0 ^ all ^ xtime(static_cast<std::uint8_t>(a0 ^ a1)));
            col[1] = static_cast<std::uint8_t>(a1 ^ all ^ xtime(static_cast<std::uint8_t>(a1 ^ a2)));
            col[2] = static_cast<std::uint8_t>(a2 ^ all ^ xtime(static_cast<std::uint8_t>(a2 ^ a3)));
            col[3] = static_cast<std::uint8_t>(a3 ^ all ^ xtime(static_cast<std::uint8_t>(a3 ^ a0)));
        }
    };

    add_round_key(0);
    for (int round = 1; round <= 9; ++round) {
        sub_bytes();
        shift_rows();
        mix_columns();
        add_round_key(round);
    }
    sub_bytes();
    shift_rows();
    add_round_key(10);

    Block out;
    for (int i = 0; i < 16; ++i) out[i] = st[i];
    return out;
}

std::unique_ptr<BlockCipher> AesCipher::clone() const {
    auto c = std::make_unique<AesCipher>(Block{});
    c->round_keys_ = round_keys_;
    return c;
}

} // namespace anct
