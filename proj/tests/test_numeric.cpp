#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cwpir/bigint.hpp"
#include "cwpir/detail/wide.hpp"
#include "cwpir/numeric.hpp"
#include "cwpir/prf.hpp"

using namespace cwpir;

TEST_CASE("modular primitives") {
    CHECK(mul_mod(3, 5, 7) == 1);
    CHECK(pow_mod(2, 10, 1000003) == 1024);
    CHECK(inv_mod(3, 65537) == pow_mod(3, 65535, 65537));
    CHECK(mul_mod(inv_mod(12345, 65537), 12345, 65537) == 1);
    CHECK_THROWS(inv_mod(2, 4));
}

TEST_CASE("primality") {
    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(65537));
    CHECK(is_prime_u64(12289));
    CHECK(is_prime_u64(40961));
    CHECK_FALSE(is_prime_u64(1));
    CHECK_FALSE(is_prime_u64(65536));
    CHECK_FALSE(is_prime_u64(49153));  // 13 * 3781
    // A couple of larger edge cases.
    CHECK(is_prime_u64(0x1FFFFFFFFFE10001ULL));
    CHECK_FALSE(is_prime_u64(0x1FFFFFFFFFE10001ULL - 2));
}

TEST_CASE("NTT prime scan") {
    const u64 p = find_ntt_prime_below((u64(1) << 54) - 1, 2 * 8192);
    CHECK(is_prime_u64(p));
    CHECK((p - 1) % 16384 == 0);
    auto three = find_ntt_primes_below((u64(1) << 54) - 1, 2 * 8192, 3);
    CHECK(three.size() == 3);
    CHECK(three[0] == p);
    CHECK(three[0] != three[1]);
    CHECK(three[1] != three[2]);
    auto excl = find_ntt_primes_below((u64(1) << 54) - 1, 2 * 8192, 1, {p});
    CHECK(excl[0] == three[1]);
}

TEST_CASE("integer roots") {
    CHECK(integer_root(0, 2) == 0);
    CHECK(integer_root(15, 2) == 3);
    CHECK(integer_root(16, 2) == 4);
    CHECK(integer_root(1u << 20, 2) == 1024);
    CHECK(integer_root(26, 3) == 2);
    CHECK(integer_root(27, 3) == 3);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const u64 n = rng() >> (rng() % 32);
        for (unsigned d = 1; d <= 5; ++d) {
            const u64 r = integer_root(n, d);
            u128 lo = 1, hi = 1;
            bool overflow = false;
            for (unsigned j = 0; j < d; ++j) {
                lo *= r;
                hi *= (r + 1);
                if (hi > u128(~u64(0)) * 4) overflow = true;
            }
            CHECK(lo <= n);
            if (!overflow) CHECK(hi > n);
        }
    }
}

TEST_CASE("BigUint arithmetic against native") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 2000; ++i) {
        const u64 a = rng() >> (rng() % 40), b = rng() >> (rng() % 40);
        CHECK((BigUint(a) + BigUint(b)) == BigUint::from_u128(u128(a) + b));
        CHECK((BigUint(a) * BigUint(b)) == BigUint::from_u128(u128(a) * b));
        if (a >= b) CHECK((BigUint(a) - BigUint(b)) == BigUint(a - b));
        if (b != 0) {
            CHECK((BigUint(a) / BigUint(b)) == BigUint(a / b));
            CHECK((BigUint(a) % BigUint(b)) == BigUint(a % b));
        }
    }
}

namespace {

BigUint random_big(std::mt19937_64& rng, unsigned max_bits) {
    const unsigned bits = 1 + rng() % max_bits;
    BigUint v;
    for (unsigned placed = 0; placed < bits; placed += 64) {
        v = (v << 64) + BigUint(rng());
    }
    return v >> (v.bit_length() > bits ? v.bit_length() - bits : 0);
}

}  // namespace

TEST_CASE("BigUint divmod round trips") {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 3000; ++i) {
        BigUint n = random_big(rng, 512);
        BigUint d = random_big(rng, 300);
        if (d.is_zero()) d = BigUint(1);
        BigUint q, r;
        BigUint::divmod(n, d, q, r);
        CHECK(r < d);
        CHECK(q * d + r == n);
    }
}

TEST_CASE("BigUint shifting and bits") {
    BigUint one(1);
    CHECK((one << 200).bit_length() == 201);
    CHECK(((one << 200) >> 200) == one);
    CHECK((one << 64) == BigUint::from_u128(u128(1) << 64));
    BigUint v = (BigUint(0xdeadbeefULL) << 100) + BigUint(12345);
    CHECK(v.mod_u64(97) == [&] {
        // independent: reduce via string of decimal digits
        u64 r = 0;
        for (char c : v.to_string()) r = (r * 10 + u64(c - '0')) % 97;
        return r;
    }());
}

TEST_CASE("binomials") {
    CHECK(binomial(3, 2) == BigUint(3));
    CHECK(binomial(22, 16) == BigUint(74613));
    CHECK(binomial(182, 2) == BigUint(16471));
    CHECK(binomial(5, 0) == BigUint(1));
    CHECK(binomial(5, 6).is_zero());
    // Pascal identity on random entries.
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        unsigned m = 2 + rng() % 400;
        unsigned k = 1 + rng() % m;
        CHECK(binomial(m, k) == binomial(m - 1, k) + binomial(m - 1, k - 1));
    }
}

TEST_CASE("wide fixed-limb helpers against BigUint") {
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 2000; ++iter) {
        BigUint n = random_big(rng, 560);
        BigUint d = random_big(rng, 200);
        if (d.is_zero()) d = BigUint(3);
        const std::size_t n_limbs = 10, d_limbs = d.limb_count();
        if (n.limb_count() > n_limbs || d_limbs > 4) continue;

        u64 num[10] = {}, quot[12] = {}, rem[8] = {}, scratch[14] = {};
        for (std::size_t i = 0; i < n.limb_count(); ++i) num[i] = n.limb(i);
        detail::WideDivisor div;
        u64 draw[4] = {};
        for (std::size_t i = 0; i < d_limbs; ++i) draw[i] = d.limb(i);
        div.init(draw, d_limbs);
        detail::w_divmod(num, n_limbs, div, quot, rem, scratch);

        BigUint q_expect, r_expect;
        BigUint::divmod(n, d, q_expect, r_expect);
        for (std::size_t i = 0; i < 10 - d_limbs + 1; ++i) {
            CHECK(quot[i] == q_expect.limb(i));
        }
        for (std::size_t i = 0; i < d_limbs; ++i) CHECK(rem[i] == r_expect.limb(i));
    }
}

TEST_CASE("Barrett 128-by-64 reduction") {
    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 500; ++iter) {
        u64 p = (rng() >> 3) | 1;
        while (p < 100) p = (rng() >> 3) | 1;
        BigUint mu = (BigUint(1) << 128) / BigUint(p);
        detail::Barrett128 br;
        br.init(p, mu.limb(1), mu.limb(0));
        for (int j = 0; j < 50; ++j) {
            const u128 x = (u128(rng()) << 64) | rng();
            CHECK(br.reduce(x) == static_cast<u64>(x % p));
        }
    }
}

TEST_CASE("ChaCha20 RFC 7539 block vector") {
    std::array<std::uint32_t, 16> in{};
    in[0] = 0x61707865;
    in[1] = 0x3320646e;
    in[2] = 0x79622d32;
    in[3] = 0x6b206574;
    // key 00 01 02 ... 1f, block count 1, nonce 00:00:00:09:00:00:00:4a:00:00:00:00
    for (int i = 0; i < 8; ++i) {
        in[4 + i] = static_cast<std::uint32_t>((4 * i) | ((4 * i + 1) << 8) |
                                               ((4 * i + 2) << 16) | ((4 * i + 3) << 24));
    }
    in[12] = 1;
    in[13] = 0x09000000;
    in[14] = 0x4a000000;
    in[15] = 0x00000000;
    std::array<std::uint32_t, 16> out{};
    chacha20_block(in, out);
    const std::array<std::uint32_t, 16> expected = {
        0xe4e7f110, 0x15593bd1, 0x1fdd0f50, 0xc47120a3, 0xc7f4d1c7, 0x0368c033,
        0x9aaa2204, 0x4e6cd4c3, 0x466482d2, 0x09aa9f07, 0x05d7c214, 0xa2028bd9,
        0xd19c12b5, 0xb94e16de, 0xe883d0cb, 0x4e3c50a2};
    CHECK(out == expected);
}

TEST_CASE("ChaChaRng determinism and uniformity") {
    ChaChaRng a(Seed256::from_u64(7), 1), b(Seed256::from_u64(7), 1), c(Seed256::from_u64(7), 2);
    bool diverged = false;
    for (int i = 0; i < 100; ++i) {
        const u64 x = a.next_u64();
        CHECK(x == b.next_u64());
        if (x != c.next_u64()) diverged = true;
    }
    CHECK(diverged);
    ChaChaRng r(Seed256::from_u64(11), 0);
    for (int i = 0; i < 10000; ++i) CHECK(r.uniform(97) < 97);
    // ternary and noise stay in range
    for (int i = 0; i < 1000; ++i) {
        const int tv = r.ternary();
        CHECK(tv >= -1);
        CHECK(tv <= 1);
        const int nv = r.sample_noise();
        CHECK(nv >= -20);
        CHECK(nv <= 20);
    }
}

TEST_CASE("SipHash-2-4 reference vector") {
    // Key 000102...0f, input 00 01 02 ... as in the reference test set.
    const u64 k0 = 0x0706050403020100ULL, k1 = 0x0f0e0d0c0b0a0908ULL;
    std::vector<std::uint8_t> msg;
    CHECK(siphash24(k0, k1, msg) == 0x726fdb47dd0e0e31ULL);
    msg.push_back(0);
    CHECK(siphash24(k0, k1, msg) == 0x74f839c593dc67fdULL);
    for (std::uint8_t i = 1; i < 8; ++i) msg.push_back(i);
    CHECK(siphash24(k0, k1, msg) == 0x93f5f5799a932462ULL);
}
