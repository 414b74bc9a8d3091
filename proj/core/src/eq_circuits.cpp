#include "cwpir/eq_circuits.hpp"

#include <stdexcept>

namespace cwpir {

namespace {

RingElement constant_plain(const HeBackend& be, u64 v) {
    return RingElement::constant(be.plain_context(), v);
}

u64 factorial_mod(unsigned k, u64 t) {
    u64 f = 1;
    for (unsigned i = 2; i <= k; ++i) f = mul_mod(f, i % t, t);
    return f;
}

}  // namespace

BitSlicedBatch encode_bit_sliced(const HeBackend& be, std::span<const u64> elements,
                                 unsigned width) {
    const auto& rt = be.plain_context();
    const std::size_t n = rt->degree();
    if (elements.size() > n) throw std::invalid_argument("more elements than slots");
    BitSlicedBatch batch;
    std::vector<u64> slots(n, 0);
    for (unsigned j = 0; j < width; ++j) {
        for (std::size_t s = 0; s < elements.size(); ++s) {
            slots[s] = (elements[s] >> j) & 1;
        }
        batch.bits.push_back(be.encrypt(batch_encode(rt, slots)));
    }
    return batch;
}

BitSlicedBatch encode_codeword_batch(const HeBackend& be, std::span<const Codeword> elements,
                                     unsigned length) {
    const auto& rt = be.plain_context();
    const std::size_t n = rt->degree();
    if (elements.size() > n) throw std::invalid_argument("more elements than slots");
    BitSlicedBatch batch;
    std::vector<u64> slots(n, 0);
    for (unsigned j = 0; j < length; ++j) {
        for (std::size_t s = 0; s < elements.size(); ++s) {
            slots[s] = elements[s].bit(j) ? 1 : 0;
        }
        batch.bits.push_back(be.encrypt(batch_encode(rt, slots)));
    }
    return batch;
}

CipherValue product_tree(const HeBackend& be, std::vector<CipherValue> nodes, bool lazy_root) {
    if (nodes.empty()) throw std::invalid_argument("product_tree: empty input");
    while (nodes.size() > 1) {
        std::vector<CipherValue> next;
        const bool last_level = nodes.size() == 2;
        for (std::size_t i = 0; i + 1 < nodes.size(); i += 2) {
            if (last_level && lazy_root) {
                next.push_back(be.mul_lazy(nodes[i], nodes[i + 1]));
            } else {
                next.push_back(be.mul(nodes[i], nodes[i + 1]));
            }
        }
        if (nodes.size() % 2) next.push_back(std::move(nodes.back()));
        nodes = std::move(next);
    }
    return std::move(nodes.front());
}

CipherValue plain_folklore_eq(const HeBackend& be, const BitSlicedBatch& x,
                              std::span<const std::uint8_t> y_bits) {
    if (x.width() != y_bits.size()) throw std::invalid_argument("operand width mismatch");
    const RingElement one = constant_plain(be, 1);
    std::vector<CipherValue> terms;
    for (unsigned i = 0; i < x.width(); ++i) {
        terms.push_back(y_bits[i] ? x.bits[i] : be.sub_from_plain(one, x.bits[i]));
    }
    return product_tree(be, std::move(terms));
}

CipherValue arith_folklore_eq(const HeBackend& be, const BitSlicedBatch& x,
                              const BitSlicedBatch& y) {
    if (x.width() != y.width()) throw std::invalid_argument("operand width mismatch");
    const RingElement one = constant_plain(be, 1);
    std::vector<CipherValue> terms;
    for (unsigned i = 0; i < x.width(); ++i) {
        CipherValue d = be.sub(x.bits[i], y.bits[i]);
        terms.push_back(be.sub_from_plain(one, be.mul(d, d)));
    }
    return product_tree(be, std::move(terms));
}

CipherValue plain_cw_eq(const HeBackend& be, const BitSlicedBatch& x, const Codeword& y,
                        bool lazy_root) {
    if (x.width() != y.length()) throw std::invalid_argument("operand width mismatch");
    const unsigned k = y.weight();
    if (k == 0) throw std::invalid_argument("reference codeword has zero weight");
    std::vector<CipherValue> selected;
    selected.reserve(k);
    for (unsigned j : y.positions()) selected.push_back(x.bits[j]);
    return product_tree(be, std::move(selected), lazy_root);
}

CipherValue arith_cw_eq(const HeBackend& be, const BitSlicedBatch& x, const BitSlicedBatch& y,
                        unsigned k) {
    if (x.width() != y.width()) throw std::invalid_argument("operand width mismatch");
    const u64 t = be.params()->plain_modulus;
    const u64 kfact = factorial_mod(k, t);
    if (kfact == 0) throw std::invalid_argument("k! is not invertible mod t");
    const u64 kfact_inv = inv_mod(kfact, t);

    // k' = <x, y>, one multiplication deep.
    CipherValue inner = be.mul(x.bits[0], y.bits[0]);
    for (unsigned i = 1; i < x.width(); ++i) {
        inner = be.add(inner, be.mul(x.bits[i], y.bits[i]));
    }
    // prod_{i in [k]} (k' - i), then scale by (k!)^{-1}.
    std::vector<CipherValue> factors;
    factors.reserve(k);
    for (unsigned i = 0; i < k; ++i) {
        factors.push_back(i == 0 ? inner
                                 : be.add_plain(inner, constant_plain(be, t - (i % t))));
    }
    CipherValue prod = product_tree(be, std::move(factors));
    return be.plain_mul(constant_plain(be, kfact_inv), prod);
}

}  // namespace cwpir
