#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cwpir/bigint.hpp"
#include "cwpir/prf.hpp"

namespace cwpir {

/// Parameters of the constant-weight code CW(m, k): bitstrings of
/// length m with Hamming weight exactly k.
struct CodeSpec {
    unsigned length = 0;  // m
    unsigned weight = 0;  // k

    CodeSpec() = default;
    CodeSpec(unsigned m, unsigned k);

    /// Number of codewords, C(m, k), exact.
    BigUint capacity() const { return binomial(length, weight); }

    bool operator==(const CodeSpec&) const = default;
};

/// A single m-bit codeword, bit i addressed LSB-first (bit i is the
/// coefficient of position i).
class Codeword {
public:
    Codeword() = default;
    explicit Codeword(unsigned length) : length_(length), words_((length + 63) / 64, 0) {}

    unsigned length() const { return length_; }
    bool bit(unsigned i) const { return (words_[i / 64] >> (i % 64)) & 1; }
    void set_bit(unsigned i) { words_[i / 64] |= u64(1) << (i % 64); }
    unsigned weight() const;

    /// Indices of set bits, ascending.
    std::vector<unsigned> positions() const;

    /// Integer comparison of the bitstrings (for order-preservation checks).
    int compare_as_integer(const Codeword& o) const;

    bool operator==(const Codeword& o) const = default;

private:
    unsigned length_ = 0;
    std::vector<u64> words_;
};

/// Smallest m with C(m, k) >= n.
unsigned min_code_length(const BigUint& n, unsigned k);
unsigned min_code_length(u64 n, unsigned k);

/// Maps x in [C(m,k)) to the x-th codeword in colexicographic order.
/// O(m + k) row updates; bijective and order preserving.
Codeword perfect_map(const BigUint& x, const CodeSpec& spec);
Codeword perfect_map(u64 x, const CodeSpec& spec);

/// Inverse of perfect_map; input must have weight exactly k.
BigUint perfect_unmap(const Codeword& y, const CodeSpec& spec);

/// Hash-based mapping for domains larger than C(m, k). Deterministic
/// for a fixed seed; distinct inputs collide with probability 1/C(m,k).
Codeword lossy_map(std::span<const std::uint8_t> input, const CodeSpec& spec, const Seed256& seed);

}  // namespace cwpir
