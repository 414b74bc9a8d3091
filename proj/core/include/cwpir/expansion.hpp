#pragma once

#include <span>
#include <vector>

#include "cwpir/he.hpp"

namespace cwpir {

/// Coefficient-packed query: h = ceil(m / 2^c) ciphertexts, each
/// holding 2^c query bits in its low coefficients, pre-scaled by
/// 2^{-c} so expansion needs no final inverse multiplication.
struct PackedQuery {
    std::vector<CipherValue> cts;
    unsigned compression = 0;  // c
    unsigned code_length = 0;  // m
};

/// Packs and encrypts a bitstring (Query construction, lines 2-4):
/// m_i(x) = sum_j 2^{-c} bits[i*2^c + j] x^j.
PackedQuery pack_query_bits(const HeBackend& be, std::span<const std::uint8_t> bits, unsigned c);

/// Oblivious expansion into one bit per ciphertext. Per inner node:
/// one substitution and two plaintext (monomial) multiplications.
/// Output has exactly `code_length` entries; entry j decrypts to the
/// constant polynomial bits[j].
std::vector<CipherValue> expand_query(const HeBackend& be, const PackedQuery& pq);

/// Reference expansion with the substitution-heavy schedule (two
/// substitutions and one plaintext multiplication per node, final
/// multiply by 2^{-c}). Kept as a permanent oracle for expand_query.
std::vector<CipherValue> expand_sealpir(const HeBackend& be, const CipherValue& ct, unsigned c);

/// Galois exponents needed to expand with compression factor c:
/// N/2^a + 1 for a in [c].
std::vector<u64> expansion_galois_exponents(std::size_t degree, unsigned c);

}  // namespace cwpir
