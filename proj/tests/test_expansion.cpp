#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cwpir/bfv.hpp"
#include "cwpir/expansion.hpp"

using namespace cwpir;

namespace {

HeParams transparent_params(std::size_t degree, u64 t) {
    HeParams p;
    p.name = "transparent";
    p.degree = degree;
    p.plain_modulus = t;
    p.declared_coeff_bits = {54};
    p.depth_cap = 32;
    return p;
}

std::vector<std::uint8_t> decrypt_bits(const HeBackend& be,
                                       const std::vector<CipherValue>& cts) {
    std::vector<std::uint8_t> out;
    for (const auto& ct : cts) {
        const RingElement m = be.decrypt(ct);
        // expanded entries must be constant polynomials
        for (std::size_t i = 1; i < m.degree(); ++i) REQUIRE(m.coeff(i) == 0);
        REQUIRE(m.coeff(0) <= 1);
        out.push_back(static_cast<std::uint8_t>(m.coeff(0)));
    }
    return out;
}

}  // namespace

TEST_CASE("c = 0 is the identity") {
    TransparentBackend be(transparent_params(64, 257));
    std::vector<std::uint8_t> bits = {1, 0, 1, 1, 0};
    const PackedQuery pq = pack_query_bits(be, bits, 0);
    CHECK(pq.cts.size() == bits.size());
    const auto expanded = expand_query(be, pq);
    CHECK(decrypt_bits(be, expanded) == bits);
}

TEST_CASE("exact recovery at N=16") {
    TransparentBackend be(transparent_params(16, 97));
    std::mt19937_64 rng(1);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<std::uint8_t> bits(16);
        for (auto& b : bits) b = rng() & 1;
        const auto expanded = expand_query(be, pack_query_bits(be, bits, 4));
        CHECK(decrypt_bits(be, expanded) == bits);
    }
}

TEST_CASE("equivalence with the reference expansion") {
    // Entry-wise agreement: the production schedule on the pre-scaled
    // input equals the reference schedule on the unscaled input.
    TransparentBackend be(transparent_params(64, 257));
    const auto& rt = be.plain_context();
    std::mt19937_64 rng(2);
    for (unsigned c = 0; c <= 6; ++c) {
        const std::size_t chunk = std::size_t(1) << c;
        auto run_both = [&](const std::vector<std::uint8_t>& bits) {
            // production: scaled input
            const PackedQuery pq = pack_query_bits(be, bits, c);
            REQUIRE(pq.cts.size() == 1);
            auto ours = expand_query(be, pq);
            // reference: unscaled input
            std::vector<u64> coeffs(rt->degree(), 0);
            for (std::size_t j = 0; j < chunk; ++j) coeffs[j] = bits[j];
            auto reference =
                expand_sealpir(be, be.encrypt(RingElement::from_coeffs(rt, coeffs)), c);
            REQUIRE(ours.size() == bits.size());
            for (std::size_t j = 0; j < ours.size(); ++j) {
                CHECK(be.decrypt(ours[j]) == be.decrypt(reference[j]));
            }
        };
        // exhaustive single-bit patterns
        for (std::size_t hot = 0; hot < chunk; ++hot) {
            std::vector<std::uint8_t> bits(chunk, 0);
            bits[hot] = 1;
            run_both(bits);
        }
        // random patterns
        for (int iter = 0; iter < 200; ++iter) {
            std::vector<std::uint8_t> bits(chunk);
            for (auto& b : bits) b = rng() & 1;
            run_both(bits);
        }
    }
}

TEST_CASE("both expansions are linear in the input") {
    TransparentBackend be(transparent_params(64, 257));
    const auto& rt = be.plain_context();
    std::mt19937_64 rng(3);
    const unsigned c = 4;
    std::vector<u64> ca(rt->degree(), 0), cb(rt->degree(), 0), csum(rt->degree(), 0);
    for (std::size_t j = 0; j < (1u << c); ++j) {
        ca[j] = rng() % 257;
        cb[j] = rng() % 257;
        csum[j] = add_mod(ca[j], cb[j], 257);
    }
    const auto ea = expand_sealpir(be, be.encrypt(RingElement::from_coeffs(rt, ca)), c);
    const auto eb = expand_sealpir(be, be.encrypt(RingElement::from_coeffs(rt, cb)), c);
    const auto es = expand_sealpir(be, be.encrypt(RingElement::from_coeffs(rt, csum)), c);
    for (std::size_t j = 0; j < es.size(); ++j) {
        CHECK(be.decrypt(es[j]) == poly_add(be.decrypt(ea[j]), be.decrypt(eb[j])));
    }
}

TEST_CASE("operation counts per expanded ciphertext") {
    TransparentBackend be(transparent_params(64, 257));
    for (unsigned c : {0u, 2u, 4u, 6u}) {
        std::vector<std::uint8_t> bits(std::size_t(1) << c, 1);
        const PackedQuery pq = pack_query_bits(be, bits, c);
        be.counter().reset();
        (void)expand_query(be, pq);
        const OpCounts counts = be.counter().snapshot();
        const u64 nodes = (u64(1) << c) - 1;
        CHECK(counts.substitute == nodes);
        CHECK(counts.plain_mul == 2 * nodes);
    }
}

TEST_CASE("surplus entries beyond the code length are dropped") {
    TransparentBackend be(transparent_params(64, 257));
    std::vector<std::uint8_t> bits(21);  // 21 bits at c=3 -> h=3, surplus 3
    std::mt19937_64 rng(4);
    for (auto& b : bits) b = rng() & 1;
    const PackedQuery pq = pack_query_bits(be, bits, 3);
    CHECK(pq.cts.size() == 3);
    const auto expanded = expand_query(be, pq);
    CHECK(expanded.size() == 21);
    CHECK(decrypt_bits(be, expanded) == bits);
}

TEST_CASE("missing Galois keys are reported") {
    TransparentBackend be(transparent_params(64, 257));
    be.restrict_galois({65});  // only level a=0
    std::vector<std::uint8_t> bits(8, 1);
    const PackedQuery pq = pack_query_bits(be, bits, 3);
    CHECK_THROWS_AS(expand_query(be, pq), he_error);
}

TEST_CASE("BFV expansion at paper-4096 with c=8") {
    BfvBackend be(bfv_preset("paper-4096"), Seed256::from_u64(5), 8);
    std::mt19937_64 rng(6);
    for (int iter = 0; iter < 3; ++iter) {
        std::vector<std::uint8_t> bits(256);
        for (auto& b : bits) b = rng() & 1;
        const PackedQuery pq = pack_query_bits(be, bits, 8);
        REQUIRE(pq.cts.size() == 1);
        const auto ours = expand_query(be, pq);
        const auto got = decrypt_bits(be, ours);
        CHECK(got == bits);
        for (const auto& ct : ours) CHECK(be.noise_budget(ct) > 0);
    }
}
