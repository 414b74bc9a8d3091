#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>

#include "cwpir/bigint.hpp"
#include "cwpir/he.hpp"

namespace cwpir {

/// Named parameter presets. The paper-* presets carry declared modulus
/// widths sized for communication accounting; the arithmetic chain is
/// a short list of word-sized NTT primes chosen at construction.
///   toy-1024     N=1024  fast CI scale, single prime, depth cap 1
///   paper-4096   N=4096  two-prime chain
///   paper-8192   N=8192  three-prime chain
///   paper-16384  N=16384 four-prime chain
HeParams bfv_preset(std::string_view name);

/// Custom parameter set for tests and tooling. Primes are found
/// automatically: `prime_bits`-sized, ≡ 1 mod 2N.
HeParams bfv_custom_params(std::size_t degree, u64 plain_modulus, unsigned chain_length,
                           unsigned prime_bits, unsigned depth_cap);

struct SecretKey {
    std::vector<std::int8_t> s;  // ternary coefficients
    Seed256 seed;                // keygen seed, for reproducibility
};

/// One key-switching key: a row of two-component encryptions of the
/// digit multiples of the switched-in polynomial. Rows are stored in
/// NTT form per chain prime.
struct KeySwitchKey {
    unsigned digit_bits = 0;  // 0 => one digit per chain prime
    std::vector<std::array<RnsPoly, 2>> rows;
};

struct EvalKeySet {
    KeySwitchKey relin;
    std::map<u64, KeySwitchKey> galois;

    std::set<u64> galois_exponents() const {
        std::set<u64> out;
        for (const auto& [g, k] : galois) out.insert(g);
        return out;
    }
};

struct BfvKeyMaterial {
    SecretKey sk;
    EvalKeySet keys;
};

/// Generates the secret key, relinearization key and Galois keys for
/// exponents N/2^a + 1, a in [galois_levels]. Deterministic in `seed`.
BfvKeyMaterial bfv_keygen(const HeParams& params, const Seed256& seed, unsigned galois_levels);

class BfvContext;  // internal precomputation, defined in bfv.cpp

/// Leveled FV/BFV implementation of the evaluation contract:
/// secret-key encryption, add, plain multiplication, tensor
/// multiplication with relinearization, Galois substitution via key
/// switching, and noise-budget reporting.
class BfvBackend : public HeBackend {
public:
    /// Client-side backend: generates keys, can decrypt.
    BfvBackend(const HeParams& params, const Seed256& seed, unsigned galois_levels);
    /// Server-side backend: evaluation keys only.
    BfvBackend(const HeParams& params, EvalKeySet keys);
    ~BfvBackend() override;

    BackendKind kind() const override { return BackendKind::bfv; }
    const HeParamsPtr& params() const override;
    const RingContextPtr& plain_context() const override;

    const EvalKeySet& eval_keys() const { return *keys_; }
    bool has_secret_key() const { return sk_.has_value(); }
    const SecretKey& secret_key() const;

    CipherValue encrypt(const RingElement& m) const override;
    RingElement decrypt(const CipherValue& c) const override;

    CipherValue add(const CipherValue& a, const CipherValue& b) const override;
    CipherValue sub(const CipherValue& a, const CipherValue& b) const override;
    CipherValue add_plain(const CipherValue& a, const RingElement& p) const override;
    CipherValue sub_from_plain(const RingElement& p, const CipherValue& a) const override;
    CipherValue plain_mul(const RingElement& p, const CipherValue& a) const override;
    CipherValue mul(const CipherValue& a, const CipherValue& b) const override;
    CipherValue mul_lazy(const CipherValue& a, const CipherValue& b) const override;
    CipherValue finalize(const CipherValue& a) const override;
    CipherValue mul_monomial(const CipherValue& a, i64 exponent) const override;
    CipherValue substitute(const CipherValue& a, u64 g) const override;

    int noise_budget(const CipherValue& c) const override;

    /// Plaintext transformed to NTT form per chain prime, for repeated
    /// multiplication against many ciphertexts.
    struct PreparedPlain {
        std::vector<std::vector<u64>> ntt_per_prime;
    };
    PreparedPlain prepare_plain(const RingElement& p) const;

    /// Two-component ciphertext lifted to the tensor basis and
    /// NTT-transformed once, for reuse across many multiplications
    /// (the selection-vector loop multiplies the same expanded query
    /// entries against every row).
    struct PreparedCipher {
        std::vector<std::vector<std::vector<u64>>> aux_ntt;  // [comp][aux][N]
        OpMeter meter;
    };
    PreparedCipher prepare_cipher(const CipherValue& ct) const;
    CipherValue mul_lazy_prepared(const PreparedCipher& a, const PreparedCipher& b) const;

    /// NTT-domain weighted sum: sum_i plains[i] * cts[i]. Counts
    /// |cts| plain multiplications and |cts|-1 additions.
    CipherValue weighted_sum(std::span<const CipherValue> cts,
                             std::span<const PreparedPlain> plains) const;

    const BigUint& modulus_product() const;

    /// Chain access for serialization and tooling.
    std::size_t chain_length() const;
    const RingContextPtr& chain_context(std::size_t i) const;
    /// Re-derives a seed-compressed uniform component.
    RnsPoly expand_seeded_component(const Seed256& seed) const;

private:
    CipherValue relinearize(const CipherValue& a) const;
    std::shared_ptr<const BfvContext> ctx_;
    std::optional<SecretKey> sk_;
    std::shared_ptr<const EvalKeySet> keys_;
};

}  // namespace cwpir
