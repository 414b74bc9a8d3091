#pragma once

// Fixed-width little-endian limb arithmetic for the exact ciphertext
// scaling paths. No allocation; callers size buffers from context
// precomputation. Everything here is checked against BigUint in tests.

#include <cstddef>
#include <cstring>

#include "cwpir/numeric.hpp"

namespace cwpir::detail {

inline void w_clear(u64* p, std::size_t n) { std::memset(p, 0, n * sizeof(u64)); }

inline void w_copy(u64* dst, const u64* src, std::size_t n) {
    std::memcpy(dst, src, n * sizeof(u64));
}

/// -1 / 0 / +1 comparison over n limbs.
inline int w_cmp(const u64* a, const u64* b, std::size_t n) {
    for (std::size_t i = n; i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

inline bool w_is_zero(const u64* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i]) return false;
    }
    return true;
}

/// a += b over n limbs; returns carry out.
inline u64 w_add(u64* a, const u64* b, std::size_t n) {
    u64 carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
        u128 s = u128(a[i]) + b[i] + carry;
        a[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
    }
    return carry;
}

/// a -= b over n limbs; returns borrow out (1 if b > a).
inline u64 w_sub(u64* a, const u64* b, std::size_t n) {
    u64 borrow = 0;
    for (std::size_t i = 0; i < n; ++i) {
        u128 need = u128(b[i]) + borrow;
        u64 cur = a[i];
        a[i] = cur - static_cast<u64>(need);
        borrow = (u128(cur) < need) ? 1 : 0;
    }
    return borrow;
}

/// acc(n_acc limbs) += src(n_src limbs) * scalar; n_acc >= n_src + 1.
inline void w_add_scaled(u64* acc, std::size_t n_acc, const u64* src, std::size_t n_src,
                         u64 scalar) {
    u64 carry = 0;
    std::size_t i = 0;
    for (; i < n_src; ++i) {
        u128 cur = u128(src[i]) * scalar + acc[i] + carry;
        acc[i] = static_cast<u64>(cur);
        carry = static_cast<u64>(cur >> 64);
    }
    for (; carry && i < n_acc; ++i) {
        u128 s = u128(acc[i]) + carry;
        acc[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
    }
}

/// a(n limbs) *= scalar, with limb n receiving the carry (caller
/// provides n+1 limbs of storage).
inline void w_mul_u64(u64* a, std::size_t n, u64 scalar) {
    u64 carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
        u128 cur = u128(a[i]) * scalar + carry;
        a[i] = static_cast<u64>(cur);
        carry = static_cast<u64>(cur >> 64);
    }
    a[n] = carry;
}

/// a <<= s (s < 64) over n limbs; bits shifted past the top are lost.
inline void w_shl(u64* a, std::size_t n, unsigned s) {
    if (s == 0) return;
    for (std::size_t i = n; i-- > 1;) {
        a[i] = (a[i] << s) | (a[i - 1] >> (64 - s));
    }
    a[0] <<= s;
}

/// a >>= s (s < 64) over n limbs.
inline void w_shr(u64* a, std::size_t n, unsigned s) {
    if (s == 0) return;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        a[i] = (a[i] >> s) | (a[i + 1] << (64 - s));
    }
    a[n - 1] >>= s;
}

inline unsigned w_bits(const u64* a, std::size_t n) {
    for (std::size_t i = n; i-- > 0;) {
        if (a[i]) {
            unsigned b = 0;
            u64 v = a[i];
            while (v) {
                v >>= 1;
                ++b;
            }
            return static_cast<unsigned>(i * 64) + b;
        }
    }
    return 0;
}

/// Reciprocal word for 2-by-1 division by a normalized d (top bit
/// set): floor((2^128 - 1) / d) - 2^64.
inline u64 reciprocal_word(u64 d) {
    const u128 b = (~u128(0)) / d;
    return static_cast<u64>(b - (u128(1) << 64));
}

/// Granlund-Moller 2-by-1 division: (u1, u0) / d with u1 < d, d
/// normalized, using the precomputed reciprocal. ~4 multiplies.
inline u64 udiv_2by1(u64 u1, u64 u0, u64 d, u64 v, u64& rem) {
    u128 q = u128(v) * u1 + ((u128(u1) << 64) | u0);
    u64 q1 = static_cast<u64>(q >> 64) + 1;
    u64 q0 = static_cast<u64>(q);
    u64 r = u0 - q1 * d;
    if (r > q0) {
        --q1;
        r += d;
    }
    if (r >= d) {
        ++q1;
        r -= d;
    }
    rem = r;
    return q1;
}

/// Precomputed division state for a fixed divisor.
struct WideDivisor {
    static constexpr std::size_t kMax = 8;
    u64 norm[kMax] = {};   // divisor << shift, top limb has high bit set
    std::size_t n = 0;     // limb count of the divisor
    unsigned shift = 0;
    u64 raw[kMax] = {};    // original divisor
    u64 recip = 0;         // reciprocal of norm[n-1]

    void init(const u64* d, std::size_t nd) {
        while (nd > 1 && d[nd - 1] == 0) --nd;
        n = nd;
        w_clear(raw, kMax);
        w_copy(raw, d, nd);
        w_clear(norm, kMax);
        w_copy(norm, d, nd);
        shift = 0;
        u64 top = norm[n - 1];
        while ((top & (u64(1) << 63)) == 0) {
            top <<= 1;
            ++shift;
        }
        w_shl(norm, n, shift);
        recip = reciprocal_word(norm[n - 1]);
    }
};

/// Knuth algorithm D: num (n_num limbs) / divisor. Requires scratch of
/// n_num + 2 limbs; writes quotient (n_num - div.n + 1 limbs) and
/// remainder (div.n limbs). Callers must have n_num >= div.n.
inline void w_divmod(const u64* num, std::size_t n_num, const WideDivisor& div, u64* quot,
                     u64* rem, u64* scratch) {
    const std::size_t n = div.n;
    // Skip leading zero limbs; the quotient shrinks accordingly.
    std::size_t eff = n_num;
    while (eff > n && num[eff - 1] == 0) --eff;
    for (std::size_t i = 0; i + n <= n_num + 1; ++i) quot[i] = 0;
    // u = num << shift, one extra limb for the shift overflow.
    w_clear(scratch, eff + 2);
    if (div.shift) {
        u64 carry = 0;
        for (std::size_t i = 0; i < eff; ++i) {
            u64 v = num[i];
            scratch[i] = (v << div.shift) | carry;
            carry = v >> (64 - div.shift);
        }
        scratch[eff] = carry;
    } else {
        w_copy(scratch, num, eff);
    }
    u64* u = scratch;
    const std::size_t m = eff - n;
    const u64 d1 = div.norm[n - 1];
    const u64 d2 = n >= 2 ? div.norm[n - 2] : 0;
    for (std::size_t j = m + 1; j-- > 0;) {
        u128 qhat;
        u128 rhat;
        if (u[j + n] >= d1) {
            // Only possible at the top position; clamp the estimate.
            qhat = ~u64(0);
            rhat = ((u128(u[j + n]) << 64) | u[j + n - 1]) - qhat * d1;
        } else {
            u64 r0;
            qhat = udiv_2by1(u[j + n], u[j + n - 1], d1, div.recip, r0);
            rhat = r0;
        }
        while (rhat <= ~u64(0) && qhat * d2 > ((rhat << 64) | (n >= 2 ? u[j + n - 2] : 0))) {
            --qhat;
            rhat += d1;
        }
        u64 mul_carry = 0, borrow = 0;
        for (std::size_t i = 0; i < n; ++i) {
            u128 p = u128(static_cast<u64>(qhat)) * div.norm[i] + mul_carry;
            mul_carry = static_cast<u64>(p >> 64);
            u128 need = u128(static_cast<u64>(p)) + borrow;
            u64 cur = u[i + j];
            u[i + j] = cur - static_cast<u64>(need);
            borrow = (u128(cur) < need) ? 1 : 0;
        }
        u128 need = u128(mul_carry) + borrow;
        u64 cur = u[j + n];
        u[j + n] = cur - static_cast<u64>(need);
        if (u128(cur) < need) {
            --qhat;
            u64 c = 0;
            for (std::size_t i = 0; i < n; ++i) {
                u128 s = u128(u[i + j]) + div.norm[i] + c;
                u[i + j] = static_cast<u64>(s);
                c = static_cast<u64>(s >> 64);
            }
            u[j + n] += c;
        }
        quot[j] = static_cast<u64>(qhat);
    }
    w_copy(rem, u, n);
    if (div.shift) w_shr(rem, n, div.shift);
}

/// 128-by-64 Barrett reduction: x mod p for any 128-bit x, p < 2^63.
struct Barrett128 {
    u64 p = 0;
    u64 mu_hi = 0, mu_lo = 0;  // floor(2^128 / p)

    void init(u64 prime, u64 hi, u64 lo) {
        p = prime;
        mu_hi = hi;
        mu_lo = lo;
    }

    u64 reduce(u128 x) const {
        // qhat = floor(x * mu / 2^128), off by at most 2.
        const u64 x0 = static_cast<u64>(x), x1 = static_cast<u64>(x >> 64);
        u128 t0 = u128(x0) * mu_lo;
        u128 t1 = u128(x0) * mu_hi + u128(x1) * mu_lo + (t0 >> 64);
        u128 qhat = u128(x1) * mu_hi + (t1 >> 64);
        u64 r = static_cast<u64>(x - qhat * p);
        while (r >= p) r -= p;
        return r;
    }
};

}  // namespace cwpir::detail
