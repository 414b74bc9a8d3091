#include "cwpir/bfv.hpp"

#include <atomic>
#include <cstring>
#include <stdexcept>

#include "cwpir/detail/wide.hpp"

namespace cwpir {

using detail::Barrett128;
using detail::WideDivisor;

namespace {

constexpr std::size_t kMaxQLimbs = 5;    // chain of <= 4 primes
constexpr std::size_t kMaxWide = 12;     // tensor-scale intermediates

Seed256 derive_seed(const Seed256& master, u64 domain, u64 index) {
    ChaChaRng rng(master, (domain << 48) ^ index);
    Seed256 s;
    for (auto& w : s.words) w = rng.next_u64();
    return s;
}

}  // namespace

/// Per-parameter-set precomputation: ring contexts for the chain and
/// the tensor basis, CRT data in fixed-limb form, digit tables for
/// key switching, and the division state for exact scaling.
class BfvContext {
public:
    HeParamsPtr params;
    RingContextPtr rt;                  // R_t
    std::vector<RingContextPtr> rq;     // chain rings
    std::vector<RingContextPtr> aux;    // tensor rings

    std::size_t N = 0;
    u64 t = 0;
    std::size_t L = 0, J = 0;

    BigUint q_big, q_half_big;
    std::size_t q_limbs = 0;
    std::vector<u64> q_fixed;                      // q, q_limbs
    std::vector<std::vector<u64>> q_odd_multiples; // (2z-1)*q, z=1..L, q_limbs+1 each
    WideDivisor q_div;

    std::vector<u64> mu_q;                         // (q/q_i)^{-1} mod q_i
    std::vector<std::vector<u64>> q_over_qi;       // q/q_i, q_limbs limbs
    std::vector<std::vector<u64>> pow64_mod_qi;    // 2^(64l) mod q_i
    std::vector<Barrett128> barrett_qi;
    std::vector<u64> delta_mod_qi;                 // floor(q/t) mod q_i
    std::vector<u64> neg_delta_mod_qi;

    BigUint p_big, p_half_big;
    std::size_t p_limbs = 0;
    std::vector<u64> p_fixed;
    std::vector<u64> mu_p;                         // (P/p_j)^{-1} mod p_j
    std::vector<std::vector<u64>> p_over_pj;       // P/p_j, p_limbs limbs
    std::vector<Barrett128> barrett_pj;
    std::vector<std::vector<u64>> pow64_mod_pj;    // 2^(64l) mod p_j, l < q_limbs

    unsigned relin_digits = 0, galois_digits = 0;
    std::vector<std::vector<u64>> relin_factor;    // [digit][prime]
    std::vector<std::vector<u64>> galois_factor;

    explicit BfvContext(const HeParams& hp) {
        validate(hp);
        params = std::make_shared<HeParams>(hp);
        N = hp.degree;
        t = hp.plain_modulus;
        L = hp.coeff_primes.size();
        rt = RingContext::create(N, t);
        for (u64 p : hp.coeff_primes) rq.push_back(RingContext::create(N, p));

        q_big = BigUint(1);
        for (u64 p : hp.coeff_primes) q_big.mul_u64(p);
        q_half_big = q_big >> 1;
        q_limbs = q_big.limb_count();
        q_fixed = pad(q_big, q_limbs);
        q_div.init(q_fixed.data(), q_limbs);
        for (std::size_t z = 1; z <= L; ++z) {
            BigUint m = q_big;
            m.mul_u64(2 * z - 1);
            q_odd_multiples.push_back(pad(m, q_limbs + 1));
        }

        for (std::size_t i = 0; i < L; ++i) {
            const u64 qi = hp.coeff_primes[i];
            BigUint over = q_big / BigUint(qi);
            mu_q.push_back(inv_mod(over.mod_u64(qi), qi));
            q_over_qi.push_back(pad(over, q_limbs));
            pow64_mod_qi.push_back(pow64_table(qi, kMaxWide));
            barrett_qi.push_back(make_barrett(qi));
        }
        BigUint delta = q_big / BigUint(t);
        for (std::size_t i = 0; i < L; ++i) {
            u64 d = delta.mod_u64(hp.coeff_primes[i]);
            delta_mod_qi.push_back(d);
            neg_delta_mod_qi.push_back(neg_mod(d, hp.coeff_primes[i]));
        }

        // Tensor basis: product must exceed 4 * N * (q/2)^2.
        const unsigned need_bits = 2 * q_big.bit_length() + log2_exact(N) + 3;
        const unsigned aux_bits = 59;
        const std::size_t count = (need_bits + aux_bits - 1) / aux_bits;
        auto aux_primes = find_ntt_primes_below((u64(1) << aux_bits) - 1, 2 * N, count,
                                                hp.coeff_primes);
        J = aux_primes.size();
        for (u64 p : aux_primes) aux.push_back(RingContext::create(N, p));
        p_big = BigUint(1);
        for (u64 p : aux_primes) p_big.mul_u64(p);
        p_half_big = p_big >> 1;
        p_limbs = p_big.limb_count();
        p_fixed = pad(p_big, p_limbs);
        for (std::size_t j = 0; j < J; ++j) {
            const u64 pj = aux_primes[j];
            BigUint over = p_big / BigUint(pj);
            mu_p.push_back(inv_mod(over.mod_u64(pj), pj));
            p_over_pj.push_back(pad(over, p_limbs));
            barrett_pj.push_back(make_barrett(pj));
            pow64_mod_pj.push_back(pow64_table(pj, kMaxQLimbs));
        }

        relin_digits = digit_count(hp.relin_digit_bits);
        galois_digits = digit_count(hp.galois_digit_bits);
        relin_factor = digit_factors(hp.relin_digit_bits);
        galois_factor = digit_factors(hp.galois_digit_bits);
    }

    u64 prime(std::size_t i) const { return params->coeff_primes[i]; }

    unsigned digit_count(unsigned digit_bits) const {
        if (digit_bits == 0) return static_cast<unsigned>(L);
        return (q_big.bit_length() + digit_bits - 1) / digit_bits;
    }

    std::vector<std::vector<u64>> digit_factors(unsigned digit_bits) const {
        const unsigned digits = digit_count(digit_bits);
        std::vector<std::vector<u64>> out(digits, std::vector<u64>(L));
        for (unsigned d = 0; d < digits; ++d) {
            BigUint factor;
            if (digit_bits == 0) {
                // lambda_d = (q/q_d) * ((q/q_d)^{-1} mod q_d)
                factor = (q_big / BigUint(prime(d)));
                factor.mul_u64(mu_q[d]);
                factor = factor % q_big;
            } else {
                factor = BigUint(1) << (digit_bits * d);
            }
            for (std::size_t i = 0; i < L; ++i) out[d][i] = factor.mod_u64(prime(i));
        }
        return out;
    }

    static std::vector<u64> pad(const BigUint& v, std::size_t n) {
        std::vector<u64> out(n, 0);
        for (std::size_t i = 0; i < v.limb_count() && i < n; ++i) out[i] = v.limb(i);
        return out;
    }

    static std::vector<u64> pow64_table(u64 p, std::size_t count) {
        std::vector<u64> out(count);
        out[0] = 1 % p;
        const u64 r = (BigUint(1) << 64).mod_u64(p);
        for (std::size_t i = 1; i < count; ++i) out[i] = mul_mod(out[i - 1], r, p);
        return out;
    }

    static Barrett128 make_barrett(u64 p) {
        BigUint mu = (BigUint(1) << 128) / BigUint(p);
        Barrett128 b;
        b.init(p, mu.limb(1), mu.limb(0));
        return b;
    }

    static void validate(const HeParams& hp) {
        if (hp.coeff_primes.empty() || hp.coeff_primes.size() > 4) {
            throw he_error("coefficient chain must have 1..4 primes");
        }
        if (!is_prime_u64(hp.plain_modulus)) throw he_error("plaintext modulus must be prime");
        for (std::size_t i = 0; i < hp.coeff_primes.size(); ++i) {
            const u64 p = hp.coeff_primes[i];
            if ((p - 1) % (2 * hp.degree) != 0) throw he_error("chain prime not NTT friendly");
            if (p <= hp.plain_modulus) throw he_error("chain prime must exceed t");
            if (p >= (u64(1) << 60)) throw he_error("chain primes must be below 2^60");
            for (std::size_t j = i + 1; j < hp.coeff_primes.size(); ++j) {
                if (hp.coeff_primes[j] == p) throw he_error("chain primes must be distinct");
            }
        }
    }

    // ---- CRT helpers -------------------------------------------------

    /// Reconstructs the integer in [0, q) whose chain residues are
    /// `res[i]` into `out` (q_limbs + 1 limbs).
    void crt_q(const u64* res, u64* out) const {
        detail::w_clear(out, q_limbs + 1);
        for (std::size_t i = 0; i < L; ++i) {
            const u64 y = barrett_qi[i].reduce(u128(res[i]) * mu_q[i]);
            detail::w_add_scaled(out, q_limbs + 1, q_over_qi[i].data(), q_limbs, y);
        }
        // out < L * q; reduce.
        u64 qp[kMaxQLimbs + 1] = {};
        detail::w_copy(qp, q_fixed.data(), q_limbs);
        while (detail::w_cmp(out, qp, q_limbs + 1) >= 0) {
            detail::w_sub(out, qp, q_limbs + 1);
        }
    }

    /// Multi-limb value -> residue mod br.p via the 2^64-power table.
    /// Safe without intermediate reduction while nl * p < 2^64.
    u64 wide_mod(const u64* v, std::size_t nl, const std::vector<u64>& pow64,
                 const Barrett128& br) const {
        u128 acc = 0;
        for (std::size_t l = 0; l < nl; ++l) {
            acc += u128(v[l]) * pow64[l];
        }
        return br.reduce(acc);
    }
};

namespace {

struct ValueCheck {
    static void same(const BfvContext& ctx, const CipherValue& v) {
        if (v.kind != BackendKind::bfv || v.params->fingerprint() != ctx.params->fingerprint()) {
            throw he_error("backend or parameter mismatch");
        }
    }
};

RnsPoly zero_rns(const BfvContext& ctx) {
    RnsPoly out;
    for (std::size_t i = 0; i < ctx.L; ++i) out.push_back(RingElement::zero(ctx.rq[i]));
    return out;
}

RnsPoly rns_add(const RnsPoly& a, const RnsPoly& b) {
    RnsPoly out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(poly_add(a[i], b[i]));
    return out;
}

RnsPoly rns_sub(const RnsPoly& a, const RnsPoly& b) {
    RnsPoly out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(poly_sub(a[i], b[i]));
    return out;
}

RnsPoly rns_neg(const RnsPoly& a) {
    RnsPoly out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(poly_neg(a[i]));
    return out;
}

/// Lifts an R_t plaintext (coefficients < t) into the chain.
RnsPoly lift_plain(const BfvContext& ctx, const RingElement& p) {
    RnsPoly out;
    for (std::size_t i = 0; i < ctx.L; ++i) {
        out.push_back(RingElement::from_coeffs(ctx.rq[i], p.coeffs()));
    }
    return out;
}

/// Delta * m in the chain.
RnsPoly scaled_plain(const BfvContext& ctx, const RingElement& m) {
    RnsPoly out;
    for (std::size_t i = 0; i < ctx.L; ++i) {
        out.push_back(scalar_mul(RingElement::from_coeffs(ctx.rq[i], m.coeffs()),
                                 ctx.delta_mod_qi[i]));
    }
    return out;
}

RnsPoly rns_automorphism(const RnsPoly& a, u64 g) {
    RnsPoly out;
    for (const auto& e : a) out.push_back(automorphism(e, g));
    return out;
}

RnsPoly rns_monomial_mul(const RnsPoly& a, i64 e) {
    RnsPoly out;
    for (const auto& x : a) out.push_back(monomial_mul(x, e));
    return out;
}

/// Integer polynomial (signed coefficients) reduced into the chain.
RnsPoly reduce_signed(const BfvContext& ctx, const std::vector<i64>& v) {
    RnsPoly out;
    for (std::size_t i = 0; i < ctx.L; ++i) {
        out.push_back(RingElement::from_signed(ctx.rq[i], v));
    }
    return out;
}

std::vector<i64> sample_noise_poly(ChaChaRng& rng, std::size_t n) {
    std::vector<i64> e(n);
    for (auto& x : e) x = rng.sample_noise();
    return e;
}

RnsPoly uniform_rns(const BfvContext& ctx, const Seed256& seed) {
    RnsPoly out;
    for (std::size_t i = 0; i < ctx.L; ++i) {
        ChaChaRng rng(seed, i);
        std::vector<u64> c(ctx.N);
        for (auto& x : c) x = rng.uniform(ctx.prime(i));
        out.push_back(RingElement::from_coeffs(ctx.rq[i], std::move(c)));
    }
    return out;
}

/// Digit decomposition of an RNS polynomial for key switching.
/// Returns digits[d] = vector of N values, each below the digit bound.
std::vector<std::vector<u64>> decompose_digits(const BfvContext& ctx, const RnsPoly& c,
                                               unsigned digit_bits, unsigned digits) {
    const std::size_t N = ctx.N;
    std::vector<std::vector<u64>> out(digits, std::vector<u64>(N));
    if (digit_bits == 0) {
        for (unsigned d = 0; d < digits; ++d) out[d] = c[d].coeffs();
        return out;
    }
    const u64 mask = (digit_bits == 64) ? ~u64(0) : ((u64(1) << digit_bits) - 1);
    u64 wide[kMaxQLimbs + 1];
    u64 res[4];
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t i = 0; i < ctx.L; ++i) res[i] = c[i].coeff(n);
        ctx.crt_q(res, wide);
        for (unsigned d = 0; d < digits; ++d) {
            const unsigned bit = d * digit_bits;
            const unsigned limb = bit / 64, off = bit % 64;
            u64 v = wide[limb] >> off;
            if (off && limb + 1 < kMaxQLimbs + 1) v |= wide[limb + 1] << (64 - off);
            out[d][n] = v & mask;
        }
    }
    return out;
}

/// Key switch core: applies `key` to polynomial `c`, returning the
/// two-component correction (in coefficient form).
std::array<RnsPoly, 2> key_switch(const BfvContext& ctx, const RnsPoly& c,
                                  const KeySwitchKey& key) {
    const std::size_t N = ctx.N, L = ctx.L;
    const unsigned digits = static_cast<unsigned>(key.rows.size());
    auto digit_vals = decompose_digits(ctx, c, key.digit_bits, digits);

    std::vector<std::vector<u64>> acc0(L, std::vector<u64>(N, 0));
    std::vector<std::vector<u64>> acc1(L, std::vector<u64>(N, 0));
    std::vector<u64> dv(N);
    for (unsigned d = 0; d < digits; ++d) {
        for (std::size_t i = 0; i < L; ++i) {
            const u64 qi = ctx.prime(i);
            for (std::size_t n = 0; n < N; ++n) {
                const u64 v = digit_vals[d][n];
                dv[n] = v >= qi ? v % qi : v;
            }
            ctx.rq[i]->ntt_forward(dv);
            ctx.rq[i]->pointwise_mul_accumulate(dv, key.rows[d][0][i].coeffs(), acc0[i]);
            ctx.rq[i]->pointwise_mul_accumulate(dv, key.rows[d][1][i].coeffs(), acc1[i]);
        }
    }
    std::array<RnsPoly, 2> out;
    for (std::size_t i = 0; i < L; ++i) {
        ctx.rq[i]->ntt_inverse(acc0[i]);
        ctx.rq[i]->ntt_inverse(acc1[i]);
        out[0].push_back(RingElement::from_coeffs(ctx.rq[i], acc0[i]));
        out[1].push_back(RingElement::from_coeffs(ctx.rq[i], acc1[i]));
    }
    return out;
}

/// Builds one key-switching key for target polynomial `target`
/// (already in the chain): rows encrypt factor_d * target under s.
KeySwitchKey make_ks_key(const BfvContext& ctx, const RnsPoly& s_rns, const RnsPoly& target,
                         unsigned digit_bits, const std::vector<std::vector<u64>>& factors,
                         const Seed256& seed) {
    KeySwitchKey key;
    key.digit_bits = digit_bits;
    const unsigned digits = static_cast<unsigned>(factors.size());
    for (unsigned d = 0; d < digits; ++d) {
        RnsPoly k1 = uniform_rns(ctx, derive_seed(seed, 11, d));
        ChaChaRng noise_rng(seed, (u64(13) << 32) | d);
        auto e = sample_noise_poly(noise_rng, ctx.N);
        RnsPoly e_rns = reduce_signed(ctx, e);
        std::array<RnsPoly, 2> row;
        row[1] = k1;
        for (std::size_t i = 0; i < ctx.L; ++i) {
            RingElement body = poly_add(poly_neg(poly_mul(k1[i], s_rns[i])), e_rns[i]);
            body = poly_add(body, scalar_mul(target[i], factors[d][i]));
            row[0].push_back(body);
        }
        // Stored in NTT form; key_switch accumulates pointwise.
        for (std::size_t i = 0; i < ctx.L; ++i) {
            auto c0 = row[0][i].coeffs();
            auto c1 = row[1][i].coeffs();
            ctx.rq[i]->ntt_forward(c0);
            ctx.rq[i]->ntt_forward(c1);
            row[0][i] = RingElement::from_coeffs(ctx.rq[i], std::move(c0));
            row[1][i] = RingElement::from_coeffs(ctx.rq[i], std::move(c1));
        }
        key.rows.push_back(std::move(row));
    }
    return key;
}

}  // namespace

HeParams bfv_custom_params(std::size_t degree, u64 plain_modulus, unsigned chain_length,
                           unsigned prime_bits, unsigned depth_cap) {
    HeParams hp;
    hp.name = "custom";
    hp.degree = degree;
    hp.plain_modulus = plain_modulus;
    hp.coeff_primes = find_ntt_primes_below((u64(1) << prime_bits) - 1, 2 * degree, chain_length);
    hp.declared_coeff_bits.assign(chain_length, prime_bits);
    hp.relin_digit_bits = 16;
    hp.galois_digit_bits = 16;
    hp.depth_cap = depth_cap;
    return hp;
}

HeParams bfv_preset(std::string_view name) {
    HeParams hp;
    hp.name = std::string(name);
    if (name == "toy-1024") {
        hp.degree = 1024;
        hp.plain_modulus = 12289;
        hp.coeff_primes = find_ntt_primes_below((u64(1) << 59) - 1, 2 * hp.degree, 1);
        hp.declared_coeff_bits = {59};
        hp.relin_digit_bits = 8;
        hp.galois_digit_bits = 8;
        hp.depth_cap = 1;
    } else if (name == "paper-4096") {
        hp.degree = 4096;
        hp.plain_modulus = 65537;
        hp.coeff_primes = find_ntt_primes_below((u64(1) << 54) - 1, 2 * hp.degree, 2);
        hp.declared_coeff_bits = {36, 36, 37};
        hp.relin_digit_bits = 8;
        hp.galois_digit_bits = 16;
        hp.depth_cap = 3;
    } else if (name == "paper-8192") {
        hp.degree = 8192;
        hp.plain_modulus = 65537;
        hp.coeff_primes = find_ntt_primes_below((u64(1) << 54) - 1, 2 * hp.degree, 3);
        hp.declared_coeff_bits = {54, 54, 54, 54};
        hp.relin_digit_bits = 0;
        hp.galois_digit_bits = 32;
        hp.depth_cap = 3;
    } else if (name == "paper-16384") {
        hp.degree = 16384;
        hp.plain_modulus = 65537;
        hp.coeff_primes = find_ntt_primes_below((u64(1) << 54) - 1, 2 * hp.degree, 4);
        hp.declared_coeff_bits = {54, 54, 54, 54, 54, 54, 54, 54};
        hp.relin_digit_bits = 16;
        hp.galois_digit_bits = 32;
        hp.depth_cap = 5;
    } else {
        throw std::invalid_argument("unknown preset: " + std::string(name));
    }
    return hp;
}

BfvKeyMaterial bfv_keygen(const HeParams& params, const Seed256& seed, unsigned galois_levels) {
    BfvContext ctx(params);
    BfvKeyMaterial out;
    ChaChaRng sk_rng(seed, 1);
    out.sk.seed = seed;
    out.sk.s.resize(ctx.N);
    for (auto& c : out.sk.s) c = static_cast<std::int8_t>(sk_rng.ternary());

    std::vector<i64> s_int(out.sk.s.begin(), out.sk.s.end());
    RnsPoly s_rns = reduce_signed(ctx, s_int);

    RnsPoly s_sq;
    for (std::size_t i = 0; i < ctx.L; ++i) s_sq.push_back(poly_mul(s_rns[i], s_rns[i]));
    out.keys.relin = make_ks_key(ctx, s_rns, s_sq, params.relin_digit_bits, ctx.relin_factor,
                                 derive_seed(seed, 2, 0));

    for (unsigned a = 0; a < galois_levels; ++a) {
        const u64 g = ctx.N / (u64(1) << a) + 1;
        RnsPoly s_g = rns_automorphism(s_rns, g);
        out.keys.galois[g] = make_ks_key(ctx, s_rns, s_g, params.galois_digit_bits,
                                         ctx.galois_factor, derive_seed(seed, 3, g));
    }
    return out;
}

BfvBackend::BfvBackend(const HeParams& params, const Seed256& seed, unsigned galois_levels)
    : ctx_(std::make_shared<BfvContext>(params)) {
    auto material = bfv_keygen(params, seed, galois_levels);
    sk_ = std::move(material.sk);
    keys_ = std::make_shared<EvalKeySet>(std::move(material.keys));
}

BfvBackend::BfvBackend(const HeParams& params, EvalKeySet keys)
    : ctx_(std::make_shared<BfvContext>(params)),
      keys_(std::make_shared<EvalKeySet>(std::move(keys))) {}

BfvBackend::~BfvBackend() = default;

const HeParamsPtr& BfvBackend::params() const { return ctx_->params; }
const RingContextPtr& BfvBackend::plain_context() const { return ctx_->rt; }
const BigUint& BfvBackend::modulus_product() const { return ctx_->q_big; }
std::size_t BfvBackend::chain_length() const { return ctx_->L; }
const RingContextPtr& BfvBackend::chain_context(std::size_t i) const { return ctx_->rq[i]; }
RnsPoly BfvBackend::expand_seeded_component(const Seed256& seed) const {
    return uniform_rns(*ctx_, seed);
}

const SecretKey& BfvBackend::secret_key() const {
    if (!sk_) throw he_error("backend holds no secret key");
    return *sk_;
}

namespace {
std::atomic<u64> g_encrypt_counter{1};
}

CipherValue BfvBackend::encrypt(const RingElement& m) const {
    if (!sk_) throw he_error("encryption requires the secret key");
    if (!(m.params() == ctx_->rt->params())) throw he_error("plaintext not in R_t");
    const u64 index = g_encrypt_counter.fetch_add(1);
    const Seed256 c1_seed = derive_seed(sk_->seed, 5, index);
    RnsPoly c1 = uniform_rns(*ctx_, c1_seed);

    ChaChaRng noise_rng(derive_seed(sk_->seed, 6, index), 0);
    auto e = sample_noise_poly(noise_rng, ctx_->N);
    RnsPoly e_rns = reduce_signed(*ctx_, e);

    std::vector<i64> s_int(sk_->s.begin(), sk_->s.end());
    RnsPoly s_rns = reduce_signed(*ctx_, s_int);
    RnsPoly dm = scaled_plain(*ctx_, m);

    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    v.comps.resize(2);
    for (std::size_t i = 0; i < ctx_->L; ++i) {
        RingElement body = poly_neg(poly_mul(c1[i], s_rns[i]));
        body = poly_add(body, e_rns[i]);
        body = poly_add(body, dm[i]);
        v.comps[0].push_back(std::move(body));
    }
    v.comps[1] = std::move(c1);
    v.c1_seed = c1_seed;
    return v;
}

RingElement BfvBackend::decrypt(const CipherValue& c) const {
    if (!sk_) throw he_error("decryption requires the secret key");
    ValueCheck::same(*ctx_, c);
    const std::size_t N = ctx_->N, L = ctx_->L;
    // v = sum_i comps[i] * s^i per prime.
    std::vector<i64> s_int(sk_->s.begin(), sk_->s.end());
    RnsPoly s_rns = reduce_signed(*ctx_, s_int);
    RnsPoly v = c.comps[0];
    RnsPoly s_pow = s_rns;
    for (std::size_t k = 1; k < c.comps.size(); ++k) {
        for (std::size_t i = 0; i < L; ++i) {
            v[i] = poly_add(v[i], poly_mul(c.comps[k][i], s_pow[i]));
        }
        if (k + 1 < c.comps.size()) {
            for (std::size_t i = 0; i < L; ++i) s_pow[i] = poly_mul(s_pow[i], s_rns[i]);
        }
    }
    // m_n = round(sum_i t*y_i / q_i) mod t with exact rounding.
    std::vector<u64> out(N);
    u64 rem_acc[kMaxQLimbs + 1];
    for (std::size_t n = 0; n < N; ++n) {
        u64 q_sum = 0;
        detail::w_clear(rem_acc, ctx_->q_limbs + 1);
        for (std::size_t i = 0; i < L; ++i) {
            const u64 qi = ctx_->prime(i);
            const u64 y = ctx_->barrett_qi[i].reduce(u128(v[i].coeff(n)) * ctx_->mu_q[i]);
            const u128 ty = u128(ctx_->t) * y;
            q_sum = (q_sum + static_cast<u64>((ty / qi) % ctx_->t)) % ctx_->t;
            detail::w_add_scaled(rem_acc, ctx_->q_limbs + 1, ctx_->q_over_qi[i].data(),
                                 ctx_->q_limbs, static_cast<u64>(ty % qi));
        }
        // rounding term: count odd multiples (2z-1)*q <= 2*A.
        detail::w_shl(rem_acc, ctx_->q_limbs + 1, 1);
        u64 round_add = 0;
        for (std::size_t z = 0; z < L; ++z) {
            if (detail::w_cmp(rem_acc, ctx_->q_odd_multiples[z].data(), ctx_->q_limbs + 1) >= 0) {
                round_add++;
            } else {
                break;
            }
        }
        out[n] = (q_sum + round_add) % ctx_->t;
    }
    return RingElement::from_coeffs(ctx_->rt, std::move(out));
}

CipherValue BfvBackend::add(const CipherValue& a, const CipherValue& b) const {
    ValueCheck::same(*ctx_, a);
    ValueCheck::same(*ctx_, b);
    counter_.record_add();
    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    const std::size_t nc = std::max(a.comps.size(), b.comps.size());
    for (std::size_t k = 0; k < nc; ++k) {
        if (k >= a.comps.size()) {
            v.comps.push_back(b.comps[k]);
        } else if (k >= b.comps.size()) {
            v.comps.push_back(a.comps[k]);
        } else {
            v.comps.push_back(rns_add(a.comps[k], b.comps[k]));
        }
    }
    v.meter.counts = a.meter.counts + b.meter.counts + OpCounts{1, 0, 0, 0};
    v.meter.depth = std::max(a.meter.depth, b.meter.depth);
    return v;
}

CipherValue BfvBackend::sub(const CipherValue& a, const CipherValue& b) const {
    ValueCheck::same(*ctx_, a);
    ValueCheck::same(*ctx_, b);
    counter_.record_add();
    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    const std::size_t nc = std::max(a.comps.size(), b.comps.size());
    for (std::size_t k = 0; k < nc; ++k) {
        if (k >= a.comps.size()) {
            v.comps.push_back(rns_neg(b.comps[k]));
        } else if (k >= b.comps.size()) {
            v.comps.push_back(a.comps[k]);
        } else {
            v.comps.push_back(rns_sub(a.comps[k], b.comps[k]));
        }
    }
    v.meter.counts = a.meter.counts + b.meter.counts + OpCounts{1, 0, 0, 0};
    v.meter.depth = std::max(a.meter.depth, b.meter.depth);
    return v;
}

CipherValue BfvBackend::add_plain(const CipherValue& a, const RingElement& p) const {
    ValueCheck::same(*ctx_, a);
    counter_.record_add();
    CipherValue v = a;
    v.c1_seed.reset();
    v.comps[0] = rns_add(v.comps[0], scaled_plain(*ctx_, p));
    v.meter.counts = a.meter.counts + OpCounts{1, 0, 0, 0};
    return v;
}

CipherValue BfvBackend::sub_from_plain(const RingElement& p, const CipherValue& a) const {
    ValueCheck::same(*ctx_, a);
    counter_.record_add();
    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    for (const auto& comp : a.comps) v.comps.push_back(rns_neg(comp));
    v.comps[0] = rns_add(v.comps[0], scaled_plain(*ctx_, p));
    v.meter.counts = a.meter.counts + OpCounts{1, 0, 0, 0};
    v.meter.depth = a.meter.depth;
    return v;
}

CipherValue BfvBackend::plain_mul(const RingElement& p, const CipherValue& a) const {
    ValueCheck::same(*ctx_, a);
    if (!(p.params() == ctx_->rt->params())) throw he_error("plain operand not reduced mod t");
    counter_.record_plain_mul();
    RnsPoly lifted = lift_plain(*ctx_, p);
    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    for (const auto& comp : a.comps) {
        RnsPoly out;
        for (std::size_t i = 0; i < ctx_->L; ++i) out.push_back(poly_mul(comp[i], lifted[i]));
        v.comps.push_back(std::move(out));
    }
    v.meter.counts = a.meter.counts + OpCounts{0, 1, 0, 0};
    v.meter.depth = a.meter.depth;
    return v;
}

CipherValue BfvBackend::mul_monomial(const CipherValue& a, i64 exponent) const {
    ValueCheck::same(*ctx_, a);
    counter_.record_plain_mul();
    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    for (const auto& comp : a.comps) v.comps.push_back(rns_monomial_mul(comp, exponent));
    v.meter.counts = a.meter.counts + OpCounts{0, 1, 0, 0};
    v.meter.depth = a.meter.depth;
    return v;
}

CipherValue BfvBackend::substitute(const CipherValue& a, u64 g) const {
    ValueCheck::same(*ctx_, a);
    auto it = keys_->galois.find(g);
    if (it == keys_->galois.end()) throw he_error("missing Galois key for requested exponent");
    CipherValue in = a.comps.size() > 2 ? finalize(a) : a;
    counter_.record_substitute();
    RnsPoly c0 = rns_automorphism(in.comps[0], g);
    RnsPoly c1 = rns_automorphism(in.comps[1], g);
    auto ks = key_switch(*ctx_, c1, it->second);
    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    v.comps.resize(2);
    v.comps[0] = rns_add(c0, ks[0]);
    v.comps[1] = std::move(ks[1]);
    v.meter.counts = in.meter.counts + OpCounts{0, 0, 0, 1};
    v.meter.depth = in.meter.depth;
    return v;
}

namespace {

/// Chain-RNS ciphertext component -> centered residues in the tensor
/// basis, one vector per auxiliary prime.
void to_aux_basis(const BfvContext& ctx, const RnsPoly& comp,
                  std::vector<std::vector<u64>>& out) {
    const std::size_t N = ctx.N, L = ctx.L, J = ctx.J;
    out.assign(J, std::vector<u64>(N));
    u64 wide[kMaxQLimbs + 1];
    u64 res[4];
    u64 q_padded[kMaxQLimbs + 1] = {};
    detail::w_copy(q_padded, ctx.q_fixed.data(), ctx.q_limbs);
    u64 half[kMaxQLimbs + 1] = {};
    for (std::size_t i = 0; i < ctx.q_half_big.limb_count(); ++i) half[i] = ctx.q_half_big.limb(i);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t i = 0; i < L; ++i) res[i] = comp[i].coeff(n);
        ctx.crt_q(res, wide);
        const bool negative = detail::w_cmp(wide, half, ctx.q_limbs + 1) > 0;
        if (negative) {
            u64 tmp[kMaxQLimbs + 1];
            detail::w_copy(tmp, q_padded, ctx.q_limbs + 1);
            detail::w_sub(tmp, wide, ctx.q_limbs + 1);
            detail::w_copy(wide, tmp, ctx.q_limbs + 1);
        }
        for (std::size_t j = 0; j < J; ++j) {
            const u64 r = ctx.wide_mod(wide, ctx.q_limbs + 1, ctx.pow64_mod_pj[j],
                                       ctx.barrett_pj[j]);
            out[j][n] = negative ? neg_mod(r, ctx.barrett_pj[j].p) : r;
        }
    }
}

}  // namespace

BfvBackend::PreparedCipher BfvBackend::prepare_cipher(const CipherValue& ct_in) const {
    ValueCheck::same(*ctx_, ct_in);
    const CipherValue& ct = ct_in.comps.size() > 2 ? finalize(ct_in) : ct_in;
    PreparedCipher out;
    out.meter = ct.meter;
    out.aux_ntt.resize(2);
    for (std::size_t k = 0; k < 2; ++k) {
        to_aux_basis(*ctx_, ct.comps[k], out.aux_ntt[k]);
        for (std::size_t j = 0; j < ctx_->J; ++j) ctx_->aux[j]->ntt_forward(out.aux_ntt[k][j]);
    }
    return out;
}

CipherValue BfvBackend::mul_lazy(const CipherValue& a, const CipherValue& b) const {
    return mul_lazy_prepared(prepare_cipher(a), prepare_cipher(b));
}

CipherValue BfvBackend::mul_lazy_prepared(const PreparedCipher& a,
                                          const PreparedCipher& b) const {
    counter_.record_mul();
    const std::size_t N = ctx_->N, J = ctx_->J, L = ctx_->L;
    const auto& a0 = a.aux_ntt[0];
    const auto& a1 = a.aux_ntt[1];
    const auto& b0 = b.aux_ntt[0];
    const auto& b1 = b.aux_ntt[1];

    // Tensor products per auxiliary prime.
    std::vector<std::vector<u64>> d0(J), d1(J), d2(J);
    for (std::size_t j = 0; j < J; ++j) {
        const auto& ring = ctx_->aux[j];
        d0[j].resize(N);
        d1[j].resize(N);
        d2[j].resize(N);
        const u64 p = ring->modulus();
        for (std::size_t n = 0; n < N; ++n) {
            d0[j][n] = ring->mul_reduce(a0[j][n], b0[j][n]);
            d1[j][n] = add_mod(ring->mul_reduce(a0[j][n], b1[j][n]),
                               ring->mul_reduce(a1[j][n], b0[j][n]), p);
            d2[j][n] = ring->mul_reduce(a1[j][n], b1[j][n]);
        }
        ring->ntt_inverse(d0[j]);
        ring->ntt_inverse(d1[j]);
        ring->ntt_inverse(d2[j]);
    }

    // Exact scale-and-round back into the chain: c_i = round(t*D_i/q).
    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    v.comps.resize(3);
    u64 acc[kMaxWide], quot[kMaxWide], rem[kMaxWide], scratch[kMaxWide + 2];
    u64 p_padded[kMaxWide] = {};
    detail::w_copy(p_padded, ctx_->p_fixed.data(), ctx_->p_limbs);
    u64 p_half[kMaxWide] = {};
    for (std::size_t i = 0; i < ctx_->p_half_big.limb_count(); ++i) {
        p_half[i] = ctx_->p_half_big.limb(i);
    }
    u64 q_padded[kMaxWide] = {};
    detail::w_copy(q_padded, ctx_->q_fixed.data(), ctx_->q_limbs);

    const std::size_t acc_limbs = ctx_->p_limbs + 1;
    const std::size_t mag_limbs = acc_limbs + 1;  // after *t
    std::vector<std::vector<u64>>* tensors[3] = {&d0, &d1, &d2};
    for (int comp = 0; comp < 3; ++comp) {
        std::vector<std::vector<u64>> out_res(L, std::vector<u64>(N));
        for (std::size_t n = 0; n < N; ++n) {
            detail::w_clear(acc, mag_limbs + 1);
            for (std::size_t j = 0; j < J; ++j) {
                const u64 y = ctx_->barrett_pj[j].reduce(u128((*tensors[comp])[j][n]) *
                                                         ctx_->mu_p[j]);
                detail::w_add_scaled(acc, acc_limbs, ctx_->p_over_pj[j].data(), ctx_->p_limbs, y);
            }
            while (detail::w_cmp(acc, p_padded, acc_limbs) >= 0) {
                detail::w_sub(acc, p_padded, acc_limbs);
            }
            const bool negative = detail::w_cmp(acc, p_half, acc_limbs) > 0;
            if (negative) {
                u64 tmp[kMaxWide];
                detail::w_copy(tmp, p_padded, acc_limbs);
                detail::w_sub(tmp, acc, acc_limbs);
                detail::w_copy(acc, tmp, acc_limbs);
            }
            // magnitude *= t, then divide by q with rounding.
            detail::w_mul_u64(acc, acc_limbs, ctx_->t);
            detail::w_divmod(acc, mag_limbs, ctx_->q_div, quot, rem, scratch);
            detail::w_shl(rem, ctx_->q_limbs + 1, 1);
            if (detail::w_cmp(rem, q_padded, ctx_->q_limbs + 1) >= 0) {
                u64 one[1] = {1};
                u64 carry = one[0];
                for (std::size_t l = 0; l < mag_limbs && carry; ++l) {
                    u128 s = u128(quot[l]) + carry;
                    quot[l] = static_cast<u64>(s);
                    carry = static_cast<u64>(s >> 64);
                }
            }
            const std::size_t quot_limbs = mag_limbs - ctx_->q_limbs + 1;
            for (std::size_t i = 0; i < L; ++i) {
                u64 r = ctx_->wide_mod(quot, quot_limbs, ctx_->pow64_mod_qi[i],
                                       ctx_->barrett_qi[i]);
                out_res[i][n] = negative ? neg_mod(r, ctx_->prime(i)) : r;
            }
        }
        for (std::size_t i = 0; i < L; ++i) {
            v.comps[comp].push_back(RingElement::from_coeffs(ctx_->rq[i], std::move(out_res[i])));
        }
    }
    v.meter.counts = a.meter.counts + b.meter.counts + OpCounts{0, 0, 1, 0};
    v.meter.depth = 1 + std::max(a.meter.depth, b.meter.depth);
    return v;
}

CipherValue BfvBackend::relinearize(const CipherValue& a) const {
    auto ks = key_switch(*ctx_, a.comps[2], keys_->relin);
    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    v.comps.resize(2);
    v.comps[0] = rns_add(a.comps[0], ks[0]);
    v.comps[1] = rns_add(a.comps[1], ks[1]);
    v.meter = a.meter;
    return v;
}

CipherValue BfvBackend::finalize(const CipherValue& a) const {
    ValueCheck::same(*ctx_, a);
    if (a.comps.size() <= 2) return a;
    return relinearize(a);
}

CipherValue BfvBackend::mul(const CipherValue& a, const CipherValue& b) const {
    return relinearize(mul_lazy(a, b));
}

int BfvBackend::noise_budget(const CipherValue& c) const {
    if (!sk_) throw he_error("noise budget requires the secret key");
    ValueCheck::same(*ctx_, c);
    const std::size_t N = ctx_->N, L = ctx_->L;
    std::vector<i64> s_int(sk_->s.begin(), sk_->s.end());
    RnsPoly s_rns = reduce_signed(*ctx_, s_int);
    RnsPoly v = c.comps[0];
    RnsPoly s_pow = s_rns;
    for (std::size_t k = 1; k < c.comps.size(); ++k) {
        for (std::size_t i = 0; i < L; ++i) {
            v[i] = poly_add(v[i], poly_mul(c.comps[k][i], s_pow[i]));
        }
        if (k + 1 < c.comps.size()) {
            for (std::size_t i = 0; i < L; ++i) s_pow[i] = poly_mul(s_pow[i], s_rns[i]);
        }
    }
    RingElement m = decrypt(c);
    RnsPoly dm = scaled_plain(*ctx_, m);
    unsigned max_bits = 0;
    u64 wide[kMaxQLimbs + 1];
    u64 res[4];
    u64 half[kMaxQLimbs + 1] = {};
    for (std::size_t i = 0; i < ctx_->q_half_big.limb_count(); ++i) {
        half[i] = ctx_->q_half_big.limb(i);
    }
    u64 q_padded[kMaxQLimbs + 1] = {};
    detail::w_copy(q_padded, ctx_->q_fixed.data(), ctx_->q_limbs);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t i = 0; i < L; ++i) {
            res[i] = sub_mod(v[i].coeff(n), dm[i].coeff(n), ctx_->prime(i));
        }
        ctx_->crt_q(res, wide);
        if (detail::w_cmp(wide, half, ctx_->q_limbs + 1) > 0) {
            u64 tmp[kMaxQLimbs + 1];
            detail::w_copy(tmp, q_padded, ctx_->q_limbs + 1);
            detail::w_sub(tmp, wide, ctx_->q_limbs + 1);
            detail::w_copy(wide, tmp, ctx_->q_limbs + 1);
        }
        max_bits = std::max(max_bits, detail::w_bits(wide, ctx_->q_limbs + 1));
    }
    const unsigned q_bits = ctx_->q_big.bit_length();
    unsigned t_bits = 0;
    u64 tv = ctx_->t;
    while (tv) {
        tv >>= 1;
        ++t_bits;
    }
    const int budget = static_cast<int>(q_bits) - 1 - static_cast<int>(t_bits) - 1 -
                       static_cast<int>(max_bits);
    return budget > 0 ? budget : 0;
}

BfvBackend::PreparedPlain BfvBackend::prepare_plain(const RingElement& p) const {
    if (!(p.params() == ctx_->rt->params())) throw he_error("plain operand not reduced mod t");
    PreparedPlain out;
    out.ntt_per_prime.resize(ctx_->L);
    for (std::size_t i = 0; i < ctx_->L; ++i) {
        out.ntt_per_prime[i] = p.coeffs();
        ctx_->rq[i]->ntt_forward(out.ntt_per_prime[i]);
    }
    return out;
}

CipherValue BfvBackend::weighted_sum(std::span<const CipherValue> cts,
                                     std::span<const PreparedPlain> plains) const {
    if (cts.empty() || cts.size() != plains.size()) {
        throw he_error("weighted_sum: size mismatch");
    }
    const std::size_t N = ctx_->N, L = ctx_->L;
    std::size_t nc = 0;
    OpMeter meter;
    for (const auto& ct : cts) {
        ValueCheck::same(*ctx_, ct);
        nc = std::max(nc, ct.comps.size());
        meter.counts = meter.counts + ct.meter.counts;
        meter.depth = std::max(meter.depth, ct.meter.depth);
    }
    std::vector<std::vector<std::vector<u64>>> acc(
        nc, std::vector<std::vector<u64>>(L, std::vector<u64>(N, 0)));
    std::vector<u64> tmp(N);
    for (std::size_t r = 0; r < cts.size(); ++r) {
        counter_.record_plain_mul();
        if (r > 0) counter_.record_add();
        for (std::size_t k = 0; k < cts[r].comps.size(); ++k) {
            for (std::size_t i = 0; i < L; ++i) {
                tmp = cts[r].comps[k][i].coeffs();
                ctx_->rq[i]->ntt_forward(tmp);
                ctx_->rq[i]->pointwise_mul_accumulate(tmp, plains[r].ntt_per_prime[i], acc[k][i]);
            }
        }
    }
    CipherValue v;
    v.kind = BackendKind::bfv;
    v.params = ctx_->params;
    v.comps.resize(nc);
    for (std::size_t k = 0; k < nc; ++k) {
        for (std::size_t i = 0; i < L; ++i) {
            ctx_->rq[i]->ntt_inverse(acc[k][i]);
            v.comps[k].push_back(RingElement::from_coeffs(ctx_->rq[i], std::move(acc[k][i])));
        }
    }
    meter.counts = meter.counts +
                   OpCounts{cts.size() - 1, cts.size(), 0, 0};
    v.meter = meter;
    return v;
}

}  // namespace cwpir
