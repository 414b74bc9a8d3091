#include "cwpir/he.hpp"

#include <cmath>

namespace cwpir {

double HeParams::expansion_factor() const {
    return 2.0 * declared_q_bits() / std::log2(static_cast<double>(plain_modulus));
}

unsigned HeParams::declared_q_bits() const {
    unsigned total = 0;
    for (unsigned b : declared_coeff_bits) total += b;
    return total;
}

unsigned HeParams::plain_bits_per_coeff() const {
    unsigned b = 0;
    while ((u64(1) << (b + 1)) <= plain_modulus) ++b;
    return b;
}

u64 HeParams::fingerprint() const {
    u64 h = 0xcbf29ce484222325ULL;
    auto mix = [&h](u64 v) {
        h ^= v;
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    };
    mix(degree);
    mix(plain_modulus);
    for (u64 p : coeff_primes) mix(p);
    for (unsigned b : declared_coeff_bits) mix(b);
    mix(relin_digit_bits);
    mix(galois_digit_bits);
    return h;
}

TransparentBackend::TransparentBackend(HeParams params)
    : params_(std::make_shared<HeParams>(std::move(params))) {
    rt_ = RingContext::create(params_->degree, params_->plain_modulus);
}

void TransparentBackend::check_value(const CipherValue& v) const {
    if (v.kind != BackendKind::transparent || v.params->fingerprint() != params_->fingerprint()) {
        throw he_error("backend or parameter mismatch");
    }
}

CipherValue TransparentBackend::encrypt(const RingElement& m) const {
    if (!(m.params() == rt_->params())) throw he_error("plaintext not in R_t");
    CipherValue v;
    v.kind = BackendKind::transparent;
    v.params = params_;
    v.plain = m;
    return v;
}

RingElement TransparentBackend::decrypt(const CipherValue& c) const {
    check_value(c);
    return c.plain;
}

CipherValue TransparentBackend::add(const CipherValue& a, const CipherValue& b) const {
    check_value(a);
    check_value(b);
    counter_.record_add();
    CipherValue v;
    v.kind = BackendKind::transparent;
    v.params = params_;
    v.plain = poly_add(a.plain, b.plain);
    v.meter.counts = a.meter.counts + b.meter.counts + OpCounts{1, 0, 0, 0};
    v.meter.depth = std::max(a.meter.depth, b.meter.depth);
    return v;
}

CipherValue TransparentBackend::sub(const CipherValue& a, const CipherValue& b) const {
    check_value(a);
    check_value(b);
    counter_.record_add();
    CipherValue v;
    v.kind = BackendKind::transparent;
    v.params = params_;
    v.plain = poly_sub(a.plain, b.plain);
    v.meter.counts = a.meter.counts + b.meter.counts + OpCounts{1, 0, 0, 0};
    v.meter.depth = std::max(a.meter.depth, b.meter.depth);
    return v;
}

CipherValue TransparentBackend::add_plain(const CipherValue& a, const RingElement& p) const {
    check_value(a);
    counter_.record_add();
    CipherValue v;
    v.kind = BackendKind::transparent;
    v.params = params_;
    v.plain = poly_add(a.plain, p);
    v.meter.counts = a.meter.counts + OpCounts{1, 0, 0, 0};
    v.meter.depth = a.meter.depth;
    return v;
}

CipherValue TransparentBackend::sub_from_plain(const RingElement& p, const CipherValue& a) const {
    check_value(a);
    counter_.record_add();
    CipherValue v;
    v.kind = BackendKind::transparent;
    v.params = params_;
    v.plain = poly_sub(p, a.plain);
    v.meter.counts = a.meter.counts + OpCounts{1, 0, 0, 0};
    v.meter.depth = a.meter.depth;
    return v;
}

CipherValue TransparentBackend::plain_mul(const RingElement& p, const CipherValue& a) const {
    check_value(a);
    if (!(p.params() == rt_->params())) throw he_error("plain operand not reduced mod t");
    counter_.record_plain_mul();
    CipherValue v;
    v.kind = BackendKind::transparent;
    v.params = params_;
    v.plain = poly_mul(p, a.plain);
    v.meter.counts = a.meter.counts + OpCounts{0, 1, 0, 0};
    v.meter.depth = a.meter.depth;
    return v;
}

CipherValue TransparentBackend::mul(const CipherValue& a, const CipherValue& b) const {
    check_value(a);
    check_value(b);
    const unsigned depth = 1 + std::max(a.meter.depth, b.meter.depth);
    if (depth > params_->depth_cap) {
        throw he_error("depth budget exhausted");
    }
    counter_.record_mul();
    CipherValue v;
    v.kind = BackendKind::transparent;
    v.params = params_;
    v.plain = poly_mul(a.plain, b.plain);
    v.meter.counts = a.meter.counts + b.meter.counts + OpCounts{0, 0, 1, 0};
    v.meter.depth = depth;
    return v;
}

CipherValue TransparentBackend::mul_monomial(const CipherValue& a, i64 exponent) const {
    check_value(a);
    counter_.record_plain_mul();
    CipherValue v;
    v.kind = BackendKind::transparent;
    v.params = params_;
    v.plain = monomial_mul(a.plain, exponent);
    v.meter.counts = a.meter.counts + OpCounts{0, 1, 0, 0};
    v.meter.depth = a.meter.depth;
    return v;
}

CipherValue TransparentBackend::substitute(const CipherValue& a, u64 g) const {
    check_value(a);
    if (allowed_galois_ && !allowed_galois_->count(g)) {
        throw he_error("missing Galois key for requested exponent");
    }
    counter_.record_substitute();
    CipherValue v;
    v.kind = BackendKind::transparent;
    v.params = params_;
    v.plain = automorphism(a.plain, g);
    v.meter.counts = a.meter.counts + OpCounts{0, 0, 0, 1};
    v.meter.depth = a.meter.depth;
    return v;
}

int TransparentBackend::noise_budget(const CipherValue& c) const {
    check_value(c);
    if (c.meter.depth >= params_->depth_cap) return 0;
    return static_cast<int>(params_->depth_cap - c.meter.depth);
}

RingElement batch_encode(const RingContextPtr& rt, std::span<const u64> slots) {
    if (!rt->ntt_enabled()) throw he_error("batching requires t ≡ 1 (mod 2N)");
    if (slots.size() != rt->degree()) throw he_error("batch_encode: slot count must equal N");
    std::vector<u64> coeffs(slots.begin(), slots.end());
    const u64 t = rt->modulus();
    for (auto& v : coeffs) {
        if (v >= t) throw he_error("batch_encode: slot value not reduced mod t");
    }
    rt->ntt_inverse(coeffs);
    return RingElement::from_coeffs(rt, std::move(coeffs));
}

std::vector<u64> batch_decode(const RingElement& p) {
    std::vector<u64> slots = p.coeffs();
    p.context()->ntt_forward(slots);
    return slots;
}

RingElement coeff_encode(const RingContextPtr& rt, std::span<const u64> chunks) {
    if (chunks.size() > rt->degree()) throw he_error("coeff_encode: too many chunks");
    const u64 t = rt->modulus();
    std::vector<u64> coeffs(rt->degree(), 0);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (chunks[i] >= t) throw he_error("coeff_encode: chunk exceeds plaintext modulus");
        coeffs[i] = chunks[i];
    }
    return RingElement::from_coeffs(rt, std::move(coeffs));
}

std::vector<u64> coeff_decode(const RingElement& p) { return p.coeffs(); }

}  // namespace cwpir
