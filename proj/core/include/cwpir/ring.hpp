#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cwpir/detail/wide.hpp"
#include "cwpir/numeric.hpp"

namespace cwpir {

/// Parameters of R_q = Z_q[x]/(x^N + 1).
struct RingParams {
    std::size_t degree = 0;  // N, power of two >= 8
    u64 modulus = 0;         // q, odd prime

    bool operator==(const RingParams&) const = default;
};

/// Immutable per-(N, q) context: validated parameters plus negacyclic
/// NTT tables whenever 2N divides q-1. Shared read-only across threads.
class RingContext {
public:
    static std::shared_ptr<const RingContext> create(std::size_t degree, u64 modulus);

    const RingParams& params() const { return params_; }
    std::size_t degree() const { return params_.degree; }
    u64 modulus() const { return params_.modulus; }
    bool ntt_enabled() const { return ntt_enabled_; }

    /// In-place negacyclic NTT, natural order in, bit-reversed out.
    void ntt_forward(std::span<u64> a) const;
    /// In-place inverse, bit-reversed in, natural order out.
    void ntt_inverse(std::span<u64> a) const;

    void pointwise_mul(std::span<const u64> a, std::span<const u64> b, std::span<u64> out) const;
    void pointwise_mul_accumulate(std::span<const u64> a, std::span<const u64> b,
                                  std::span<u64> acc) const;

    /// Negacyclic product on raw coefficient vectors (NTT or schoolbook).
    void negacyclic_mul(std::span<const u64> a, std::span<const u64> b, std::span<u64> out) const;

    /// (a * b) mod q without a hardware divide.
    u64 mul_reduce(u64 a, u64 b) const { return barrett_.reduce(u128(a) * b); }

private:
    RingContext() = default;
    RingParams params_;
    bool ntt_enabled_ = false;
    detail::Barrett128 barrett_;
    std::vector<u64> root_pow_, root_pow_shoup_;
    std::vector<u64> inv_root_pow_, inv_root_pow_shoup_;
    u64 n_inv_ = 0, n_inv_shoup_ = 0;
};

using RingContextPtr = std::shared_ptr<const RingContext>;

/// Polynomial in R_q with canonical coefficients in [0, q).
/// Immutable value semantics: operations return fresh elements.
class RingElement {
public:
    RingElement() = default;
    static RingElement zero(RingContextPtr ctx);
    static RingElement constant(RingContextPtr ctx, u64 value);
    static RingElement monomial(RingContextPtr ctx, u64 coeff, std::size_t exponent);
    static RingElement from_coeffs(RingContextPtr ctx, std::vector<u64> coeffs);
    /// Signed coefficients are normalized into [0, q).
    static RingElement from_signed(RingContextPtr ctx, const std::vector<i64>& coeffs);

    const RingContextPtr& context() const { return ctx_; }
    const RingParams& params() const { return ctx_->params(); }
    std::size_t degree() const { return ctx_->degree(); }
    u64 modulus() const { return ctx_->modulus(); }

    const std::vector<u64>& coeffs() const { return coeffs_; }
    std::vector<u64>& coeffs_mut() { return coeffs_; }
    u64 coeff(std::size_t i) const { return coeffs_[i]; }

    bool is_zero() const;
    bool operator==(const RingElement& o) const;

private:
    RingContextPtr ctx_;
    std::vector<u64> coeffs_;
};

RingElement poly_add(const RingElement& a, const RingElement& b);
RingElement poly_sub(const RingElement& a, const RingElement& b);
RingElement poly_neg(const RingElement& a);
RingElement poly_mul(const RingElement& a, const RingElement& b);
RingElement scalar_mul(const RingElement& a, u64 s);

/// a(x) * x^e with x^N = -1; e may be negative (reduced mod 2N).
RingElement monomial_mul(const RingElement& a, i64 e);

/// a(x^g) reduced mod (x^N + 1); requires odd g in (0, 2N).
RingElement automorphism(const RingElement& a, u64 g);

}  // namespace cwpir
