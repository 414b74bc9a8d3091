#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cwpir/bfv.hpp"
#include "cwpir/eq_circuits.hpp"
#include "support/oracles.hpp"

using namespace cwpir;

namespace {

HeParams transparent_params(std::size_t degree, u64 t, unsigned cap = 32) {
    HeParams p;
    p.name = "transparent";
    p.degree = degree;
    p.plain_modulus = t;
    p.declared_coeff_bits = {54};
    p.depth_cap = cap;
    return p;
}

std::vector<std::uint8_t> bits_of(u64 v, unsigned width) {
    std::vector<std::uint8_t> out(width);
    for (unsigned i = 0; i < width; ++i) out[i] = (v >> i) & 1;
    return out;
}

Codeword codeword_from_mask(u64 mask, unsigned m) {
    Codeword cw(m);
    for (unsigned i = 0; i < m; ++i) {
        if ((mask >> i) & 1) cw.set_bit(i);
    }
    return cw;
}

/// Decodes slot s of an equality result.
std::vector<u64> result_slots(const HeBackend& be, const CipherValue& r) {
    return batch_decode(be.decrypt(r));
}

}  // namespace

TEST_CASE("plain folklore equality, exhaustive l=4") {
    TransparentBackend be(transparent_params(64, 257));
    for (u64 y = 0; y < 16; ++y) {
        // all 16 candidate x values share one batch
        std::vector<u64> xs(16);
        for (u64 x = 0; x < 16; ++x) xs[x] = x;
        const BitSlicedBatch batch = encode_bit_sliced(be, xs, 4);
        const CipherValue r = plain_folklore_eq(be, batch, bits_of(y, 4));
        const auto slots = result_slots(be, r);
        for (u64 x = 0; x < 16; ++x) CHECK(slots[x] == (x == y ? 1 : 0));
        CHECK(r.meter.depth == 2);            // ceil(log2 4)
        CHECK(r.meter.counts.mul == 3);       // l - 1
    }
}

TEST_CASE("arithmetic folklore equality, exhaustive l=3") {
    TransparentBackend be(transparent_params(64, 65537));
    for (u64 y = 0; y < 8; ++y) {
        std::vector<u64> xs(8), ys(8, y);
        for (u64 x = 0; x < 8; ++x) xs[x] = x;
        const BitSlicedBatch bx = encode_bit_sliced(be, xs, 3);
        const BitSlicedBatch by = encode_bit_sliced(be, ys, 3);
        const CipherValue r = arith_folklore_eq(be, bx, by);
        const auto slots = result_slots(be, r);
        for (u64 x = 0; x < 8; ++x) CHECK(slots[x] == (x == y ? 1 : 0));
        CHECK(r.meter.depth == 1 + 2);        // 1 + ceil(log2 3)
        CHECK(r.meter.counts.mul == 2 * 3 - 1);
    }
}

TEST_CASE("plain constant-weight equality, exhaustive (6,2)") {
    TransparentBackend be(transparent_params(64, 257));
    const auto masks = test::enumerate_weight_k_masks(6, 2);
    REQUIRE(masks.size() == 15);
    std::vector<Codeword> words;
    for (u64 m : masks) words.push_back(codeword_from_mask(m, 6));
    const BitSlicedBatch batch = encode_codeword_batch(be, words, 6);
    for (std::size_t yi = 0; yi < words.size(); ++yi) {
        const CipherValue r = plain_cw_eq(be, batch, words[yi]);
        const auto slots = result_slots(be, r);
        for (std::size_t xi = 0; xi < words.size(); ++xi) {
            CHECK(slots[xi] == (xi == yi ? 1 : 0));
        }
        CHECK(r.meter.depth == 1);            // ceil(log2 2)
        CHECK(r.meter.counts.mul == 1);       // k - 1
    }
}

TEST_CASE("arithmetic constant-weight equality, exhaustive (5,2)") {
    TransparentBackend be(transparent_params(64, 65537));
    const auto masks = test::enumerate_weight_k_masks(5, 2);
    REQUIRE(masks.size() == 10);
    std::vector<Codeword> words;
    for (u64 m : masks) words.push_back(codeword_from_mask(m, 5));
    for (std::size_t yi = 0; yi < words.size(); ++yi) {
        std::vector<Codeword> ys(words.size(), words[yi]);
        const BitSlicedBatch bx = encode_codeword_batch(be, words, 5);
        const BitSlicedBatch by = encode_codeword_batch(be, ys, 5);
        be.counter().reset();
        const CipherValue r = arith_cw_eq(be, bx, by, 2);
        const auto slots = result_slots(be, r);
        for (std::size_t xi = 0; xi < words.size(); ++xi) {
            CHECK(slots[xi] == (xi == yi ? 1 : 0));
        }
        CHECK(r.meter.depth == 1 + 1);  // 1 + ceil(log2 k)
        // executed ops (the shared inner product is charged once)
        const OpCounts executed = be.counter().snapshot();
        CHECK(executed.mul == 5 + 2 - 1);
        CHECK(executed.plain_mul == 1);  // final (k!)^{-1}
    }
}

TEST_CASE("inner product hits k exactly on equality") {
    // The arithmetic operator's intermediate k' equals k when the
    // operands match.
    TransparentBackend be(transparent_params(64, 65537));
    const Codeword w = codeword_from_mask(0b10110, 5);
    std::vector<Codeword> xs(1, w), ys(1, w);
    const BitSlicedBatch bx = encode_codeword_batch(be, xs, 5);
    const BitSlicedBatch by = encode_codeword_batch(be, ys, 5);
    CipherValue inner = be.mul(bx.bits[0], by.bits[0]);
    for (unsigned i = 1; i < 5; ++i) inner = be.add(inner, be.mul(bx.bits[i], by.bits[i]));
    CHECK(batch_decode(be.decrypt(inner))[0] == 3);  // weight of w
}

TEST_CASE("field requirement: k! must be invertible") {
    TransparentBackend be(transparent_params(64, 257));
    std::vector<Codeword> xs = {codeword_from_mask(0b11, 5)};
    const BitSlicedBatch bx = encode_codeword_batch(be, xs, 5);
    CHECK_THROWS(arith_cw_eq(be, bx, bx, 300));  // 300! ≡ 0 mod 257
}

TEST_CASE("slot independence") {
    TransparentBackend be(transparent_params(64, 257));
    std::vector<u64> xs(8);
    for (u64 x = 0; x < 8; ++x) xs[x] = x;
    const std::vector<std::uint8_t> y = bits_of(5, 3);
    const BitSlicedBatch base = encode_bit_sliced(be, xs, 3);
    const auto base_slots = result_slots(be, plain_folklore_eq(be, base, y));
    // corrupt slot 2 of the input (flip its low bit)
    auto xs2 = xs;
    xs2[2] ^= 1;
    const auto mod_slots =
        result_slots(be, plain_folklore_eq(be, encode_bit_sliced(be, xs2, 3), y));
    for (u64 s = 0; s < 8; ++s) {
        if (s == 2) continue;
        CHECK(base_slots[s] == mod_slots[s]);
    }
}

TEST_CASE("depth and op counts across sizes") {
    // Depths per circuit family, with the arithmetic constant-weight
    // depth at 1 + ceil(log2 k).
    TransparentBackend be(transparent_params(1024, 12289, 64));
    std::mt19937_64 rng(9);
    for (unsigned size : {2u, 4u, 8u, 16u}) {
        // plain folklore over l = size
        std::vector<u64> xs = {rng() % (u64(1) << size)};
        BitSlicedBatch bx = encode_bit_sliced(be, xs, size);
        auto r = plain_folklore_eq(be, bx, bits_of(xs[0], size));
        CHECK(r.meter.depth == ceil_log2(size));
        CHECK(r.meter.counts.mul == size - 1);

        BitSlicedBatch by = encode_bit_sliced(be, xs, size);
        r = arith_folklore_eq(be, bx, by);
        CHECK(r.meter.depth == 1 + ceil_log2(size));
        CHECK(r.meter.counts.mul == 2 * size - 1);

        // constant-weight with k = size over CW(m, k)
        const unsigned m = size + 4;
        CodeSpec spec(m, size);
        const Codeword w = perfect_map(u64(0), spec);
        std::vector<Codeword> ws = {w};
        BitSlicedBatch cx = encode_codeword_batch(be, ws, m);
        r = plain_cw_eq(be, cx, w);
        CHECK(r.meter.depth == ceil_log2(size));
        CHECK(r.meter.counts.mul == size - 1);

        be.counter().reset();
        r = arith_cw_eq(be, cx, cx, size);
        CHECK(r.meter.depth == 1 + ceil_log2(size));
        const OpCounts executed = be.counter().snapshot();
        CHECK(executed.mul == m + size - 1);
        CHECK(executed.plain_mul == 1);
    }
}

TEST_CASE("exhaustive equality on the BFV backend") {
    // Depth-3 circuits over full batches need a roomy chain; a short
    // ring keeps the exhaustive sweeps fast.
    BfvBackend be(bfv_custom_params(2048, 12289, 3, 54, 3), Seed256::from_u64(31), 0);

    SUBCASE("plain constant-weight (6,2)") {
        const auto masks = test::enumerate_weight_k_masks(6, 2);
        std::vector<Codeword> words;
        for (u64 m : masks) words.push_back(codeword_from_mask(m, 6));
        const BitSlicedBatch batch = encode_codeword_batch(be, words, 6);
        for (std::size_t yi = 0; yi < words.size(); ++yi) {
            const auto slots = result_slots(be, plain_cw_eq(be, batch, words[yi]));
            for (std::size_t xi = 0; xi < words.size(); ++xi) {
                CHECK(slots[xi] == (xi == yi ? 1 : 0));
            }
        }
    }

    SUBCASE("arithmetic constant-weight (6,3)") {
        const auto masks = test::enumerate_weight_k_masks(6, 3);
        REQUIRE(masks.size() == 20);
        std::vector<Codeword> words;
        for (u64 m : masks) words.push_back(codeword_from_mask(m, 6));
        // all 400 ordered pairs across batches of N slots
        std::vector<Codeword> xs, ys;
        for (const auto& a : words) {
            for (const auto& b : words) {
                xs.push_back(a);
                ys.push_back(b);
            }
        }
        const BitSlicedBatch bx = encode_codeword_batch(be, xs, 6);
        const BitSlicedBatch by = encode_codeword_batch(be, ys, 6);
        const CipherValue r = arith_cw_eq(be, bx, by, 3);
        CHECK(be.noise_budget(r) > 0);
        const auto slots = result_slots(be, r);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CHECK(slots[i] == (xs[i] == ys[i] ? 1 : 0));
        }
    }

    SUBCASE("plain and arithmetic folklore l=4") {
        std::vector<u64> xs, ys;
        for (u64 x = 0; x < 16; ++x) {
            for (u64 y = 0; y < 16; ++y) {
                xs.push_back(x);
                ys.push_back(y);
            }
        }
        const BitSlicedBatch bx = encode_bit_sliced(be, xs, 4);
        const BitSlicedBatch by = encode_bit_sliced(be, ys, 4);
        const CipherValue ra = arith_folklore_eq(be, bx, by);
        CHECK(be.noise_budget(ra) > 0);
        const auto arith_slots = result_slots(be, ra);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CHECK(arith_slots[i] == (xs[i] == ys[i] ? 1 : 0));
        }
        for (u64 y = 0; y < 16; ++y) {
            const auto slots = result_slots(be, plain_folklore_eq(be, bx, bits_of(y, 4)));
            for (std::size_t i = 0; i < xs.size(); ++i) {
                CHECK(slots[i] == (xs[i] == y ? 1 : 0));
            }
        }
    }
}
