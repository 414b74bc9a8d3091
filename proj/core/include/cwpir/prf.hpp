#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <span>
#include <string_view>

#include "cwpir/numeric.hpp"

namespace cwpir {

/// 256-bit seed used across key generation, encryption randomness and
/// the lossy-mapping hash family.
struct Seed256 {
    std::array<u64, 4> words{};

    static Seed256 from_u64(u64 v) {
        Seed256 s;
        s.words = {v, 0x9e3779b97f4a7c15ULL, 0xbf58476d1ce4e5b9ULL, 0x94d049bb133111ebULL};
        return s;
    }
    bool operator==(const Seed256&) const = default;
};

/// ChaCha20-based deterministic random stream (RFC 7539 block function,
/// counter mode). `stream_id` separates independent streams drawn from
/// one seed.
class ChaChaRng {
public:
    explicit ChaChaRng(const Seed256& seed, u64 stream_id = 0);

    u64 next_u64();

    /// Uniform in [0, bound) via rejection sampling; bound >= 1.
    u64 uniform(u64 bound);

    /// Uniform signed value in {-1, 0, 1} with the usual ternary key
    /// distribution (equal thirds).
    int ternary();

    /// Centered binomial with 20 coin pairs: variance 10, sigma ~= 3.16.
    int sample_noise();

    void fill_bytes(std::span<std::uint8_t> out);

private:
    void refill();
    std::array<std::uint32_t, 16> input_{};
    std::array<std::uint32_t, 16> block_{};
    std::size_t pos_ = 16;  // consumed words in block_
};

/// Raw ChaCha20 block function, exposed for test vectors.
void chacha20_block(const std::array<std::uint32_t, 16>& in, std::array<std::uint32_t, 16>& out);

/// SipHash-2-4 with a 128-bit key; the keyed hash behind the lossy
/// constant-weight mapping.
u64 siphash24(u64 k0, u64 k1, std::span<const std::uint8_t> data);

inline u64 siphash24(u64 k0, u64 k1, std::string_view data) {
    return siphash24(k0, k1,
                     std::span<const std::uint8_t>(
                         reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

}  // namespace cwpir
