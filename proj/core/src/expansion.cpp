#include "cwpir/expansion.hpp"

#include <stdexcept>

#include "cwpir/parallel.hpp"

namespace cwpir {

std::vector<u64> expansion_galois_exponents(std::size_t degree, unsigned c) {
    std::vector<u64> out;
    for (unsigned a = 0; a < c; ++a) {
        out.push_back(degree / (u64(1) << a) + 1);
    }
    return out;
}

PackedQuery pack_query_bits(const HeBackend& be, std::span<const std::uint8_t> bits, unsigned c) {
    const auto& rt = be.plain_context();
    const std::size_t n = rt->degree();
    if ((u64(1) << c) > n) throw std::invalid_argument("compression factor exceeds log2(N)");
    const u64 t = rt->modulus();
    const u64 chunk = u64(1) << c;
    const u64 scale = inv_mod(pow_mod(2, c, t), t);

    PackedQuery pq;
    pq.compression = c;
    pq.code_length = static_cast<unsigned>(bits.size());
    const std::size_t h = (bits.size() + chunk - 1) / chunk;
    for (std::size_t i = 0; i < h; ++i) {
        std::vector<u64> coeffs(n, 0);
        for (u64 j = 0; j < chunk; ++j) {
            const std::size_t idx = i * chunk + j;
            if (idx < bits.size() && bits[idx]) coeffs[j] = scale;
        }
        pq.cts.push_back(be.encrypt(RingElement::from_coeffs(rt, std::move(coeffs))));
    }
    return pq;
}

namespace {

/// Expands one ciphertext into 2^c entries, level by level; the b-loop
/// within a level is parallel.
std::vector<CipherValue> expand_one(const HeBackend& be, const CipherValue& ct, unsigned c) {
    const std::size_t n = be.params()->degree;
    std::vector<CipherValue> cts;
    cts.reserve(u64(1) << c);
    cts.push_back(ct);
    for (unsigned a = 0; a < c; ++a) {
        const u64 g = n / (u64(1) << a) + 1;
        const i64 shift = -static_cast<i64>(u64(1) << a);
        const std::size_t level = u64(1) << a;
        cts.resize(2 * level);
        parallel_for(level, [&](std::size_t b) {
            CipherValue subbed = be.substitute(cts[b], g);
            CipherValue shifted_sub = be.mul_monomial(subbed, shift);
            CipherValue shifted = be.mul_monomial(cts[b], shift);
            cts[b + level] = be.sub(shifted, shifted_sub);
            cts[b] = be.add(cts[b], subbed);
        });
    }
    return cts;
}

}  // namespace

std::vector<CipherValue> expand_query(const HeBackend& be, const PackedQuery& pq) {
    const std::size_t chunk = u64(1) << pq.compression;
    if (pq.cts.size() * chunk < pq.code_length) {
        throw std::invalid_argument("packed query too short for code length");
    }
    std::vector<CipherValue> out;
    out.reserve(pq.code_length);
    for (const auto& ct : pq.cts) {
        auto part = expand_one(be, ct, pq.compression);
        for (auto& v : part) {
            if (out.size() == pq.code_length) break;  // surplus entries discarded
            out.push_back(std::move(v));
        }
        if (out.size() == pq.code_length) break;
    }
    return out;
}

std::vector<CipherValue> expand_sealpir(const HeBackend& be, const CipherValue& ct, unsigned c) {
    const std::size_t n = be.params()->degree;
    const u64 t = be.params()->plain_modulus;
    std::vector<CipherValue> cts;
    cts.reserve(u64(1) << c);
    cts.push_back(ct);
    for (unsigned a = 0; a < c; ++a) {
        const u64 g = n / (u64(1) << a) + 1;
        const i64 shift = -static_cast<i64>(u64(1) << a);
        const std::size_t level = u64(1) << a;
        cts.resize(2 * level);
        for (std::size_t b = 0; b < level; ++b) {
            CipherValue c0 = cts[b];
            CipherValue c1 = be.mul_monomial(c0, shift);
            cts[b] = be.add(c0, be.substitute(c0, g));
            cts[b + level] = be.add(c1, be.substitute(c1, g));
        }
    }
    const u64 inv = inv_mod(pow_mod(2, c, t), t);
    const RingElement inv_plain = RingElement::constant(be.plain_context(), inv);
    for (auto& v : cts) v = be.plain_mul(inv_plain, v);
    return cts;
}

}  // namespace cwpir
