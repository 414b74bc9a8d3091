#include "cwpir/prf.hpp"

#include <cstring>

namespace cwpir {

namespace {

inline std::uint32_t rotl32(std::uint32_t x, int n) {
    return (x << n) | (x >> (32 - n));
}

inline void quarter_round(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c, std::uint32_t& d) {
    a += b; d ^= a; d = rotl32(d, 16);
    c += d; b ^= c; b = rotl32(b, 12);
    a += b; d ^= a; d = rotl32(d, 8);
    c += d; b ^= c; b = rotl32(b, 7);
}

}  // namespace

void chacha20_block(const std::array<std::uint32_t, 16>& in, std::array<std::uint32_t, 16>& out) {
    out = in;
    for (int round = 0; round < 10; ++round) {
        quarter_round(out[0], out[4], out[8], out[12]);
        quarter_round(out[1], out[5], out[9], out[13]);
        quarter_round(out[2], out[6], out[10], out[14]);
        quarter_round(out[3], out[7], out[11], out[15]);
        quarter_round(out[0], out[5], out[10], out[15]);
        quarter_round(out[1], out[6], out[11], out[12]);
        quarter_round(out[2], out[7], out[8], out[13]);
        quarter_round(out[3], out[4], out[9], out[14]);
    }
    for (int i = 0; i < 16; ++i) out[i] += in[i];
}

ChaChaRng::ChaChaRng(const Seed256& seed, u64 stream_id) {
    input_[0] = 0x61707865;
    input_[1] = 0x3320646e;
    input_[2] = 0x79622d32;
    input_[3] = 0x6b206574;
    for (int i = 0; i < 4; ++i) {
        input_[4 + 2 * i] = static_cast<std::uint32_t>(seed.words[i]);
        input_[5 + 2 * i] = static_cast<std::uint32_t>(seed.words[i] >> 32);
    }
    input_[12] = 0;  // block counter
    input_[13] = static_cast<std::uint32_t>(stream_id);
    input_[14] = static_cast<std::uint32_t>(stream_id >> 32);
    input_[15] = 0;
}

void ChaChaRng::refill() {
    chacha20_block(input_, block_);
    if (++input_[12] == 0) ++input_[15];
    pos_ = 0;
}

u64 ChaChaRng::next_u64() {
    if (pos_ + 2 > 16) refill();
    u64 lo = block_[pos_], hi = block_[pos_ + 1];
    pos_ += 2;
    return lo | (hi << 32);
}

u64 ChaChaRng::uniform(u64 bound) {
    if (bound <= 1) return 0;
    const u64 limit = (~u64(0)) - (~u64(0)) % bound;
    u64 v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

int ChaChaRng::ternary() {
    return static_cast<int>(uniform(3)) - 1;
}

int ChaChaRng::sample_noise() {
    u64 bits_a = next_u64() & ((u64(1) << 20) - 1);
    u64 bits_b = next_u64() & ((u64(1) << 20) - 1);
    return __builtin_popcountll(bits_a) - __builtin_popcountll(bits_b);
}

void ChaChaRng::fill_bytes(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        if (pos_ == 16) refill();
        std::uint32_t word = block_[pos_++];
        for (int b = 0; b < 4 && i < out.size(); ++b) {
            out[i++] = static_cast<std::uint8_t>(word >> (8 * b));
        }
    }
}

namespace {

inline u64 rotl64(u64 x, int n) { return (x << n) | (x >> (64 - n)); }

inline void sip_round(u64& v0, u64& v1, u64& v2, u64& v3) {
    v0 += v1; v1 = rotl64(v1, 13); v1 ^= v0; v0 = rotl64(v0, 32);
    v2 += v3; v3 = rotl64(v3, 16); v3 ^= v2;
    v0 += v3; v3 = rotl64(v3, 21); v3 ^= v0;
    v2 += v1; v1 = rotl64(v1, 17); v1 ^= v2; v2 = rotl64(v2, 32);
}

}  // namespace

u64 siphash24(u64 k0, u64 k1, std::span<const std::uint8_t> data) {
    u64 v0 = k0 ^ 0x736f6d6570736575ULL;
    u64 v1 = k1 ^ 0x646f72616e646f6dULL;
    u64 v2 = k0 ^ 0x6c7967656e657261ULL;
    u64 v3 = k1 ^ 0x7465646279746573ULL;

    const std::size_t n = data.size();
    const std::size_t end = n - (n % 8);
    for (std::size_t i = 0; i < end; i += 8) {
        u64 m;
        std::memcpy(&m, data.data() + i, 8);
        v3 ^= m;
        sip_round(v0, v1, v2, v3);
        sip_round(v0, v1, v2, v3);
        v0 ^= m;
    }
    u64 last = u64(n & 0xff) << 56;
    for (std::size_t i = end; i < n; ++i) {
        last |= u64(data[i]) << (8 * (i - end));
    }
    v3 ^= last;
    sip_round(v0, v1, v2, v3);
    sip_round(v0, v1, v2, v3);
    v0 ^= last;
    v2 ^= 0xff;
    sip_round(v0, v1, v2, v3);
    sip_round(v0, v1, v2, v3);
    sip_round(v0, v1, v2, v3);
    sip_round(v0, v1, v2, v3);
    return v0 ^ v1 ^ v2 ^ v3;
}

}  // namespace cwpir
