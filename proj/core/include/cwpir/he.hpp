#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwpir/meter.hpp"
#include "cwpir/prf.hpp"
#include "cwpir/ring.hpp"

namespace cwpir {

struct he_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameter set shared by the evaluation backends. The ciphertext
/// modulus is a chain of word-sized NTT primes (their product is q);
/// `declared_coeff_bits` carries the modulus widths used for
/// communication-size accounting, which may differ from the
/// arithmetic chain.
struct HeParams {
    std::string name;
    std::size_t degree = 0;                    // N
    u64 plain_modulus = 0;                     // t, odd prime
    std::vector<u64> coeff_primes;             // arithmetic chain, each ≡ 1 mod 2N
    std::vector<unsigned> declared_coeff_bits; // size-accounting widths
    unsigned relin_digit_bits = 16;            // 0 = one digit per chain prime
    unsigned galois_digit_bits = 16;
    unsigned depth_cap = 1;                    // transparent-backend emulation
    double sigma = 3.2;

    /// Ciphertext-to-plaintext expansion factor F = 2 log q / log t,
    /// computed from the declared widths.
    double expansion_factor() const;
    unsigned declared_q_bits() const;
    unsigned plain_bits_per_coeff() const;  // floor(log2 t)

    u64 fingerprint() const;
    bool operator==(const HeParams&) const = default;
};

using HeParamsPtr = std::shared_ptr<const HeParams>;

enum class BackendKind : std::uint8_t { transparent = 0, bfv = 1 };

/// One RNS component: the same integer polynomial reduced per chain prime.
using RnsPoly = std::vector<RingElement>;

/// Backend-tagged homomorphic value. Transparent values carry the
/// plaintext itself (over R_t); BFV values carry ciphertext
/// components. Immutable once produced.
struct CipherValue {
    BackendKind kind = BackendKind::transparent;
    HeParamsPtr params;
    OpMeter meter;

    RingElement plain;              // transparent payload
    std::vector<RnsPoly> comps;     // BFV payload (2 or 3 components)
    std::optional<Seed256> c1_seed; // set on fresh secret-key ciphertexts
    u64 c1_stream = 0;
};

/// The evaluation contract: encode/encrypt/decrypt plus the four
/// homomorphic operations, with additive/plain variants the circuits
/// need. Plaintext operands live in R_t.
class HeBackend {
public:
    virtual ~HeBackend() = default;
    virtual BackendKind kind() const = 0;
    virtual const HeParamsPtr& params() const = 0;
    virtual const RingContextPtr& plain_context() const = 0;

    virtual CipherValue encrypt(const RingElement& m) const = 0;
    virtual RingElement decrypt(const CipherValue& c) const = 0;

    virtual CipherValue add(const CipherValue& a, const CipherValue& b) const = 0;
    virtual CipherValue sub(const CipherValue& a, const CipherValue& b) const = 0;
    virtual CipherValue add_plain(const CipherValue& a, const RingElement& p) const = 0;
    virtual CipherValue sub_from_plain(const RingElement& p, const CipherValue& a) const = 0;
    virtual CipherValue plain_mul(const RingElement& p, const CipherValue& a) const = 0;
    virtual CipherValue mul(const CipherValue& a, const CipherValue& b) const = 0;
    virtual CipherValue mul_monomial(const CipherValue& a, i64 exponent) const = 0;
    virtual CipherValue substitute(const CipherValue& a, u64 g) const = 0;

    /// Product that may defer relinearization; finalize() settles any
    /// pending material. Defaults to the strict path.
    virtual CipherValue mul_lazy(const CipherValue& a, const CipherValue& b) const {
        return mul(a, b);
    }
    virtual CipherValue finalize(const CipherValue& a) const { return a; }

    /// Remaining headroom in bits; 0 means decryption is untrusted.
    /// The transparent backend reports depth-cap slack instead.
    virtual int noise_budget(const CipherValue& c) const = 0;

    OpCounter& counter() const { return counter_; }

protected:
    mutable OpCounter counter_;
};

/// Plaintext-evaluating reference backend with full op metering and a
/// depth cap that emulates running out of noise budget.
class TransparentBackend : public HeBackend {
public:
    explicit TransparentBackend(HeParams params);
    /// Restricts substitution to the given Galois exponents, mirroring
    /// a backend that holds a concrete key set.
    void restrict_galois(std::set<u64> exponents) { allowed_galois_ = std::move(exponents); }

    BackendKind kind() const override { return BackendKind::transparent; }
    const HeParamsPtr& params() const override { return params_; }
    const RingContextPtr& plain_context() const override { return rt_; }

    CipherValue encrypt(const RingElement& m) const override;
    RingElement decrypt(const CipherValue& c) const override;

    CipherValue add(const CipherValue& a, const CipherValue& b) const override;
    CipherValue sub(const CipherValue& a, const CipherValue& b) const override;
    CipherValue add_plain(const CipherValue& a, const RingElement& p) const override;
    CipherValue sub_from_plain(const RingElement& p, const CipherValue& a) const override;
    CipherValue plain_mul(const RingElement& p, const CipherValue& a) const override;
    CipherValue mul(const CipherValue& a, const CipherValue& b) const override;
    CipherValue mul_monomial(const CipherValue& a, i64 exponent) const override;
    CipherValue substitute(const CipherValue& a, u64 g) const override;
    int noise_budget(const CipherValue& c) const override;

private:
    void check_value(const CipherValue& v) const;
    HeParamsPtr params_;
    RingContextPtr rt_;
    std::optional<std::set<u64>> allowed_galois_;
};

/// SIMD slot encoding over R_t; requires t ≡ 1 (mod 2N). Ring products
/// of encoded plaintexts act slot-wise.
RingElement batch_encode(const RingContextPtr& rt, std::span<const u64> slots);
std::vector<u64> batch_decode(const RingElement& p);

/// Chunk j of `chunks` lands in coefficient j; remaining coefficients zero.
RingElement coeff_encode(const RingContextPtr& rt, std::span<const u64> chunks);
std::vector<u64> coeff_decode(const RingElement& p);

}  // namespace cwpir
