#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cwpir/bfv.hpp"
#include "cwpir/he.hpp"

using namespace cwpir;

namespace {

HeParams small_params(unsigned depth_cap = 8) {
    HeParams p;
    p.name = "transparent-64";
    p.degree = 64;
    p.plain_modulus = 257;  // 257 ≡ 1 (mod 128)
    p.declared_coeff_bits = {54};
    p.depth_cap = depth_cap;
    return p;
}

RingElement random_plain(const RingContextPtr& rt, std::mt19937_64& rng) {
    std::vector<u64> c(rt->degree());
    for (auto& x : c) x = rng() % rt->modulus();
    return RingElement::from_coeffs(rt, std::move(c));
}

}  // namespace

TEST_CASE("transparent round trip and fresh meter") {
    TransparentBackend be(small_params());
    std::mt19937_64 rng(1);
    const RingElement m = random_plain(be.plain_context(), rng);
    const CipherValue ct = be.encrypt(m);
    CHECK(be.decrypt(ct) == m);
    CHECK(ct.meter.depth == 0);
    CHECK(ct.meter.counts == OpCounts{});
}

TEST_CASE("homomorphism against direct R_t arithmetic") {
    TransparentBackend be(small_params());
    const auto& rt = be.plain_context();
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10000; ++trial) {
        const RingElement a = random_plain(rt, rng);
        const RingElement b = random_plain(rt, rng);
        switch (trial % 5) {
            case 0:
                CHECK(be.decrypt(be.add(be.encrypt(a), be.encrypt(b))) == poly_add(a, b));
                break;
            case 1:
                CHECK(be.decrypt(be.sub(be.encrypt(a), be.encrypt(b))) == poly_sub(a, b));
                break;
            case 2:
                CHECK(be.decrypt(be.plain_mul(a, be.encrypt(b))) == poly_mul(a, b));
                break;
            case 3:
                CHECK(be.decrypt(be.mul(be.encrypt(a), be.encrypt(b))) == poly_mul(a, b));
                break;
            case 4: {
                const u64 g = 2 * (rng() % rt->degree()) + 1;
                CHECK(be.decrypt(be.substitute(be.encrypt(a), g)) == automorphism(a, g));
                break;
            }
        }
    }
}

TEST_CASE("operation examples") {
    TransparentBackend be(small_params());
    const auto& rt = be.plain_context();
    std::mt19937_64 rng(3);
    const RingElement m = random_plain(rt, rng);
    const CipherValue ct = be.encrypt(m);

    CHECK(be.decrypt(be.add(ct, be.encrypt(RingElement::zero(rt)))) == m);
    CHECK(be.decrypt(be.plain_mul(RingElement::constant(rt, 1), ct)) == m);
    CHECK(be.decrypt(be.plain_mul(RingElement::zero(rt), ct)).is_zero());
    CHECK(be.decrypt(be.mul(be.encrypt(RingElement::constant(rt, 1)), ct)) == m);
    CHECK(be.decrypt(be.mul(be.encrypt(RingElement::zero(rt)), ct)).is_zero());

    // substitution: identity at g=1, x -> x^{N/2+1}, and group inverse
    CHECK(be.decrypt(be.substitute(ct, 1)) == m);
    const u64 g = rt->degree() / 2 + 1;
    const RingElement x = RingElement::monomial(rt, 1, 1);
    CHECK(be.decrypt(be.substitute(be.encrypt(x), g)) == automorphism(x, g));
    const u64 g_inv = inv_mod(g, 2 * rt->degree());
    CHECK(be.decrypt(be.substitute(be.substitute(ct, g), g_inv)) == m);
}

TEST_CASE("meter semantics") {
    TransparentBackend be(small_params());
    const auto& rt = be.plain_context();
    std::mt19937_64 rng(4);
    const CipherValue a = be.encrypt(random_plain(rt, rng));
    const CipherValue b = be.encrypt(random_plain(rt, rng));

    const CipherValue s = be.add(a, b);
    CHECK(s.meter.counts.add == 1);
    CHECK(s.meter.depth == 0);

    const CipherValue p = be.mul(a, b);
    CHECK(p.meter.counts.mul == 1);
    CHECK(p.meter.depth == 1);

    // PM and substitution leave the depth alone
    const CipherValue pm = be.plain_mul(random_plain(rt, rng), p);
    CHECK(pm.meter.depth == 1);
    CHECK(pm.meter.counts.plain_mul == 1);
    const CipherValue sb = be.substitute(p, 3);
    CHECK(sb.meter.depth == 1);
    CHECK(sb.meter.counts.substitute == 1);

    // depth of a product is 1 + max of the factors; parallel branches
    // do not inflate it
    const CipherValue deep = be.mul(p, be.mul(a, b));
    CHECK(deep.meter.depth == 2);
    const CipherValue wide = be.add(be.mul(a, b), be.mul(a, b));
    CHECK(wide.meter.depth == 1);

    // backend counter tallies executed operations
    be.counter().reset();
    (void)be.mul(a, b);
    (void)be.add(a, b);
    (void)be.add(a, b);
    const OpCounts counts = be.counter().snapshot();
    CHECK(counts.mul == 1);
    CHECK(counts.add == 2);
}

TEST_CASE("depth cap emulates noise exhaustion") {
    TransparentBackend be(small_params(2));
    const auto& rt = be.plain_context();
    std::mt19937_64 rng(5);
    CipherValue acc = be.encrypt(random_plain(rt, rng));
    acc = be.mul(acc, be.encrypt(random_plain(rt, rng)));
    CHECK(be.noise_budget(acc) == 1);
    acc = be.mul(acc, be.encrypt(random_plain(rt, rng)));
    CHECK(be.noise_budget(acc) == 0);
    CHECK_THROWS_AS(be.mul(acc, be.encrypt(random_plain(rt, rng))), he_error);
}

TEST_CASE("galois restriction") {
    TransparentBackend be(small_params());
    be.restrict_galois({65, 33});
    std::mt19937_64 rng(6);
    const CipherValue ct = be.encrypt(random_plain(be.plain_context(), rng));
    CHECK_NOTHROW(be.substitute(ct, 65));
    CHECK_THROWS_AS(be.substitute(ct, 5), he_error);
}

TEST_CASE("backend mismatch is rejected") {
    TransparentBackend t64(small_params());
    HeParams other = small_params();
    other.plain_modulus = 641;  // 641 ≡ 1 (mod 128)
    TransparentBackend t_other(other);
    std::mt19937_64 rng(7);
    const CipherValue ct = t64.encrypt(random_plain(t64.plain_context(), rng));
    CHECK_THROWS_AS(t_other.add(ct, ct), he_error);
}

TEST_CASE("oracle equivalence with BFV across random circuits") {
    // Same random circuit on both backends decrypts identically
    // whenever the BFV noise budget stays positive.
    for (const char* preset : {"toy-1024", "paper-4096"}) {
        const HeParams params = bfv_preset(preset);
        BfvBackend bfv(params, Seed256::from_u64(11), 1);
        TransparentBackend plain(params);
        const auto& rt = bfv.plain_context();
        std::mt19937_64 rng(12);
        const int trials = std::string(preset) == "toy-1024" ? 400 : 100;
        int compared = 0;
        for (int trial = 0; trial < trials; ++trial) {
            const RingElement m0 = random_plain(rt, rng);
            const RingElement m1 = random_plain(rt, rng);
            CipherValue cb = bfv.encrypt(m0);
            CipherValue ct = plain.encrypt(m0);
            const int ops = 1 + int(rng() % 4);
            for (int o = 0; o < ops; ++o) {
                switch (rng() % 4) {
                    case 0:
                        cb = bfv.add(cb, bfv.encrypt(m1));
                        ct = plain.add(ct, plain.encrypt(m1));
                        break;
                    case 1:
                        cb = bfv.plain_mul(m1, cb);
                        ct = plain.plain_mul(m1, ct);
                        break;
                    case 2:
                        if (ct.meter.depth + 1 > params.depth_cap) break;
                        cb = bfv.mul(cb, bfv.encrypt(m1));
                        ct = plain.mul(ct, plain.encrypt(m1));
                        break;
                    case 3: {
                        const u64 g = params.degree + 1;
                        cb = bfv.substitute(cb, g);
                        ct = plain.substitute(ct, g);
                        break;
                    }
                }
            }
            if (bfv.noise_budget(cb) > 0) {
                ++compared;
                CHECK(bfv.decrypt(cb) == plain.decrypt(ct));
            }
        }
        CHECK(compared > 0);
    }
}
