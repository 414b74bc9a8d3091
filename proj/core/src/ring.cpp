#include "cwpir/ring.hpp"

#include <stdexcept>

namespace cwpir {

namespace {

inline u64 shoup_precompute(u64 w, u64 q) {
    return static_cast<u64>((u128(w) << 64) / q);
}

// (x * w) mod q with precomputed w_shoup = floor(w * 2^64 / q);
// result in [0, 2q). Requires x < 2^64, q < 2^62.
inline u64 mul_shoup_lazy(u64 x, u64 w, u64 w_shoup, u64 q) {
    const u64 hi = static_cast<u64>((u128(x) * w_shoup) >> 64);
    return x * w - hi * q;
}

unsigned bit_reverse(unsigned v, unsigned bits) {
    unsigned r = 0;
    for (unsigned i = 0; i < bits; ++i) {
        r = (r << 1) | ((v >> i) & 1);
    }
    return r;
}

}  // namespace

std::shared_ptr<const RingContext> RingContext::create(std::size_t degree, u64 modulus) {
    if (!is_power_of_two(degree) || degree < 8) {
        throw std::invalid_argument("ring degree must be a power of two >= 8");
    }
    if (modulus < 3 || modulus % 2 == 0 || !is_prime_u64(modulus)) {
        throw std::invalid_argument("ring modulus must be an odd prime");
    }
    if (modulus >= (u64(1) << 62)) {
        throw std::invalid_argument("ring modulus must fit in 62 bits");
    }
    auto ctx = std::shared_ptr<RingContext>(new RingContext());
    ctx->params_ = {degree, modulus};
    const u64 q = modulus;
    const std::size_t n = degree;
    // q is an odd prime, so floor((2^128 - 1)/q) == floor(2^128 / q).
    const u128 mu = (~u128(0)) / q;
    ctx->barrett_.init(q, static_cast<u64>(mu >> 64), static_cast<u64>(mu));
    ctx->ntt_enabled_ = ((q - 1) % (2 * n) == 0);
    if (ctx->ntt_enabled_) {
        const u64 g = primitive_root(q);
        const u64 psi = pow_mod(g, (q - 1) / (2 * n), q);
        // psi is a primitive 2N-th root: psi^N == -1.
        if (pow_mod(psi, n, q) != q - 1) {
            throw std::runtime_error("NTT setup: psi^N != -1");
        }
        const u64 psi_inv = inv_mod(psi, q);
        const unsigned logn = log2_exact(n);
        ctx->root_pow_.resize(n);
        ctx->inv_root_pow_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            unsigned r = bit_reverse(static_cast<unsigned>(i), logn);
            ctx->root_pow_[i] = pow_mod(psi, r, q);
            ctx->inv_root_pow_[i] = pow_mod(psi_inv, r, q);
        }
        ctx->root_pow_shoup_.resize(n);
        ctx->inv_root_pow_shoup_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            ctx->root_pow_shoup_[i] = shoup_precompute(ctx->root_pow_[i], q);
            ctx->inv_root_pow_shoup_[i] = shoup_precompute(ctx->inv_root_pow_[i], q);
        }
        ctx->n_inv_ = inv_mod(n % q, q);
        ctx->n_inv_shoup_ = shoup_precompute(ctx->n_inv_, q);
    }
    return ctx;
}

// Harvey-style lazy butterflies: values live in [0, 4q) during the
// forward levels and are normalized at the end. Safe for q < 2^60.
void RingContext::ntt_forward(std::span<u64> a) const {
    if (!ntt_enabled_) throw std::logic_error("NTT not available for this modulus");
    const u64 q = params_.modulus;
    const u64 two_q = 2 * q;
    const std::size_t n = params_.degree;
    u64* const data = a.data();
    const u64* rp = root_pow_.data();
    const u64* rs = root_pow_shoup_.data();
    std::size_t t = n;
    for (std::size_t m = 1; m < n; m <<= 1) {
        t >>= 1;
        for (std::size_t i = 0; i < m; ++i) {
            const u64 w = rp[m + i];
            const u64 ws = rs[m + i];
            u64* lo = data + 2 * i * t;
            u64* hi = lo + t;
            for (std::size_t j = 0; j < t; ++j) {
                u64 u = lo[j];
                if (u >= two_q) u -= two_q;
                const u64 v = mul_shoup_lazy(hi[j], w, ws, q);
                lo[j] = u + v;
                hi[j] = u - v + two_q;
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        u64 v = data[j];
        if (v >= two_q) v -= two_q;
        if (v >= q) v -= q;
        data[j] = v;
    }
}

void RingContext::ntt_inverse(std::span<u64> a) const {
    if (!ntt_enabled_) throw std::logic_error("NTT not available for this modulus");
    const u64 q = params_.modulus;
    const u64 two_q = 2 * q;
    const std::size_t n = params_.degree;
    u64* const data = a.data();
    const u64* rp = inv_root_pow_.data();
    const u64* rs = inv_root_pow_shoup_.data();
    std::size_t t = 1;
    for (std::size_t m = n; m > 1; m >>= 1) {
        const std::size_t h = m >> 1;
        u64* lo = data;
        for (std::size_t i = 0; i < h; ++i) {
            const u64 w = rp[h + i];
            const u64 ws = rs[h + i];
            u64* hi = lo + t;
            for (std::size_t j = 0; j < t; ++j) {
                const u64 u = lo[j];
                const u64 v = hi[j];
                u64 s = u + v;
                if (s >= two_q) s -= two_q;
                lo[j] = s;
                hi[j] = mul_shoup_lazy(u - v + two_q, w, ws, q);
            }
            lo += 2 * t;
        }
        t <<= 1;
    }
    for (std::size_t j = 0; j < n; ++j) {
        u64 v = mul_shoup_lazy(data[j], n_inv_, n_inv_shoup_, q);
        if (v >= q) v -= q;
        data[j] = v;
    }
}

void RingContext::pointwise_mul(std::span<const u64> a, std::span<const u64> b,
                                std::span<u64> out) const {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = barrett_.reduce(u128(a[i]) * b[i]);
}

void RingContext::pointwise_mul_accumulate(std::span<const u64> a, std::span<const u64> b,
                                           std::span<u64> acc) const {
    const u64 q = params_.modulus;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc[i] = add_mod(acc[i], barrett_.reduce(u128(a[i]) * b[i]), q);
    }
}

void RingContext::negacyclic_mul(std::span<const u64> a, std::span<const u64> b,
                                 std::span<u64> out) const {
    const std::size_t n = params_.degree;
    const u64 q = params_.modulus;
    if (ntt_enabled_) {
        std::vector<u64> ta(a.begin(), a.end()), tb(b.begin(), b.end());
        ntt_forward(ta);
        ntt_forward(tb);
        pointwise_mul(ta, tb, ta);
        ntt_inverse(ta);
        for (std::size_t i = 0; i < n; ++i) out[i] = ta[i];
        return;
    }
    std::vector<u64> acc(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            const u64 p = mul_mod(a[i], b[j], q);
            const std::size_t k = i + j;
            if (k < n) {
                acc[k] = add_mod(acc[k], p, q);
            } else {
                acc[k - n] = sub_mod(acc[k - n], p, q);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = acc[i];
}

RingElement RingElement::zero(RingContextPtr ctx) {
    RingElement e;
    e.coeffs_.assign(ctx->degree(), 0);
    e.ctx_ = std::move(ctx);
    return e;
}

RingElement RingElement::constant(RingContextPtr ctx, u64 value) {
    RingElement e = zero(std::move(ctx));
    e.coeffs_[0] = value % e.modulus();
    return e;
}

RingElement RingElement::monomial(RingContextPtr ctx, u64 coeff, std::size_t exponent) {
    if (exponent >= ctx->degree()) throw std::invalid_argument("monomial exponent out of range");
    RingElement e = zero(std::move(ctx));
    e.coeffs_[exponent] = coeff % e.modulus();
    return e;
}

RingElement RingElement::from_coeffs(RingContextPtr ctx, std::vector<u64> coeffs) {
    if (coeffs.size() != ctx->degree()) {
        throw std::invalid_argument("coefficient count does not match ring degree");
    }
    const u64 q = ctx->modulus();
    for (auto& c : coeffs) c %= q;
    RingElement e;
    e.ctx_ = std::move(ctx);
    e.coeffs_ = std::move(coeffs);
    return e;
}

RingElement RingElement::from_signed(RingContextPtr ctx, const std::vector<i64>& coeffs) {
    if (coeffs.size() != ctx->degree()) {
        throw std::invalid_argument("coefficient count does not match ring degree");
    }
    const u64 q = ctx->modulus();
    std::vector<u64> out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        i64 v = coeffs[i] % static_cast<i64>(q);
        if (v < 0) v += static_cast<i64>(q);
        out[i] = static_cast<u64>(v);
    }
    RingElement e;
    e.ctx_ = std::move(ctx);
    e.coeffs_ = std::move(out);
    return e;
}

bool RingElement::is_zero() const {
    for (u64 c : coeffs_) {
        if (c != 0) return false;
    }
    return true;
}

bool RingElement::operator==(const RingElement& o) const {
    return ctx_->params() == o.ctx_->params() && coeffs_ == o.coeffs_;
}

namespace {

void require_same_ring(const RingElement& a, const RingElement& b) {
    if (!(a.params() == b.params())) {
        throw std::invalid_argument("ring parameter mismatch");
    }
}

}  // namespace

RingElement poly_add(const RingElement& a, const RingElement& b) {
    require_same_ring(a, b);
    const u64 q = a.modulus();
    std::vector<u64> out(a.degree());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = add_mod(a.coeff(i), b.coeff(i), q);
    return RingElement::from_coeffs(a.context(), std::move(out));
}

RingElement poly_sub(const RingElement& a, const RingElement& b) {
    require_same_ring(a, b);
    const u64 q = a.modulus();
    std::vector<u64> out(a.degree());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sub_mod(a.coeff(i), b.coeff(i), q);
    return RingElement::from_coeffs(a.context(), std::move(out));
}

RingElement poly_neg(const RingElement& a) {
    const u64 q = a.modulus();
    std::vector<u64> out(a.degree());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = neg_mod(a.coeff(i), q);
    return RingElement::from_coeffs(a.context(), std::move(out));
}

RingElement poly_mul(const RingElement& a, const RingElement& b) {
    require_same_ring(a, b);
    std::vector<u64> out(a.degree());
    a.context()->negacyclic_mul(a.coeffs(), b.coeffs(), out);
    return RingElement::from_coeffs(a.context(), std::move(out));
}

RingElement scalar_mul(const RingElement& a, u64 s) {
    const u64 q = a.modulus();
    s %= q;
    std::vector<u64> out(a.degree());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mul_mod(a.coeff(i), s, q);
    return RingElement::from_coeffs(a.context(), std::move(out));
}

RingElement monomial_mul(const RingElement& a, i64 e) {
    const std::size_t n = a.degree();
    const u64 q = a.modulus();
    const i64 two_n = static_cast<i64>(2 * n);
    i64 shift = ((e % two_n) + two_n) % two_n;
    std::vector<u64> out(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pos = i + static_cast<std::size_t>(shift);
        if (pos < n) {
            out[pos] = a.coeff(i);
        } else if (pos < 2 * n) {
            out[pos - n] = neg_mod(a.coeff(i), q);
        } else {
            out[pos - 2 * n] = a.coeff(i);
        }
    }
    return RingElement::from_coeffs(a.context(), std::move(out));
}

RingElement automorphism(const RingElement& a, u64 g) {
    const std::size_t n = a.degree();
    const u64 q = a.modulus();
    if (g % 2 == 0 || g == 0 || g >= 2 * n) {
        throw std::invalid_argument("automorphism exponent must be odd in (0, 2N)");
    }
    std::vector<u64> out(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t e = (i * g) % (2 * n);
        if (e < n) {
            out[e] = a.coeff(i);
        } else {
            out[e - n] = neg_mod(a.coeff(i), q);
        }
    }
    return RingElement::from_coeffs(a.context(), std::move(out));
}

}  // namespace cwpir
