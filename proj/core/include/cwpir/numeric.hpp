#pragma once

#include <cstdint>
#include <vector>

namespace cwpir {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i64 = std::int64_t;
using i128 = __int128;

/// (a * b) mod m for m < 2^63, via 128-bit product.
inline u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((u128(a) * b) % m);
}

inline u64 add_mod(u64 a, u64 b, u64 m) {
    u64 s = a + b;
    return s >= m || s < a ? s - m : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 m) {
    return a >= b ? a - b : a + m - b;
}

inline u64 neg_mod(u64 a, u64 m) { return a == 0 ? 0 : m - a; }

u64 pow_mod(u64 base, u64 exp, u64 m);

/// Multiplicative inverse mod m (m need not be prime; a and m coprime).
/// Throws std::invalid_argument when no inverse exists.
u64 inv_mod(u64 a, u64 m);

/// Deterministic Miller-Rabin, valid for any 64-bit input.
bool is_prime_u64(u64 n);

/// Largest prime p <= hint with p ≡ 1 (mod modulus_step), suitable as an
/// NTT modulus for negacyclic transforms of the matching degree.
/// Throws std::runtime_error if the scan falls below 3 * modulus_step.
u64 find_ntt_prime_below(u64 hint, u64 modulus_step);

/// First `count` NTT-friendly primes at or below `hint`, descending,
/// excluding anything in `exclude`.
std::vector<u64> find_ntt_primes_below(u64 hint, u64 modulus_step, std::size_t count,
                                       const std::vector<u64>& exclude = {});

/// Smallest generator-derived primitive root of Z_p^* (p prime).
u64 primitive_root(u64 p);

inline bool is_power_of_two(u64 n) { return n != 0 && (n & (n - 1)) == 0; }

inline unsigned log2_exact(u64 n) {
    unsigned r = 0;
    while ((u64(1) << r) < n) ++r;
    return r;
}

/// ceil(log2(n)) for n >= 1.
inline unsigned ceil_log2(u64 n) {
    unsigned r = 0;
    while ((u64(1) << r) < n) ++r;
    return r;
}

/// Exact integer d-th root: largest r with r^d <= n.
u64 integer_root(u64 n, unsigned d);

}  // namespace cwpir
