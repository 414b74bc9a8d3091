#include "cwpir/numeric.hpp"

#include <stdexcept>

namespace cwpir {

u64 pow_mod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

u64 inv_mod(u64 a, u64 m) {
    i64 t = 0, new_t = 1;
    i64 r = static_cast<i64>(m), new_r = static_cast<i64>(a % m);
    while (new_r != 0) {
        i64 q = r / new_r;
        i64 tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) throw std::invalid_argument("inv_mod: operand not invertible");
    if (t < 0) t += static_cast<i64>(m);
    return static_cast<u64>(t);
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Witness set proven complete for all n < 2^64.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

u64 find_ntt_prime_below(u64 hint, u64 modulus_step) {
    u64 p = hint - (hint % modulus_step) + 1;
    if (p > hint) p -= modulus_step;
    while (p > 3 * modulus_step) {
        if (is_prime_u64(p)) return p;
        p -= modulus_step;
    }
    throw std::runtime_error("find_ntt_prime_below: no prime in range");
}

std::vector<u64> find_ntt_primes_below(u64 hint, u64 modulus_step, std::size_t count,
                                       const std::vector<u64>& exclude) {
    std::vector<u64> out;
    u64 p = hint + 1;
    while (out.size() < count) {
        p = find_ntt_prime_below(p - 1, modulus_step);
        bool skip = false;
        for (u64 e : exclude) skip |= (e == p);
        if (!skip) out.push_back(p);
    }
    return out;
}

u64 primitive_root(u64 p) {
    u64 phi = p - 1;
    std::vector<u64> factors;
    u64 n = phi;
    for (u64 f = 2; f * f <= n; ++f) {
        if (n % f == 0) {
            factors.push_back(f);
            while (n % f == 0) n /= f;
        }
    }
    if (n > 1) factors.push_back(n);
    for (u64 g = 2; g < p; ++g) {
        bool ok = true;
        for (u64 f : factors) {
            if (pow_mod(g, phi / f, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw std::runtime_error("primitive_root: none found");
}

u64 integer_root(u64 n, unsigned d) {
    if (d == 0) throw std::invalid_argument("integer_root: d must be >= 1");
    if (d == 1 || n < 2) return n;
    u64 lo = 1, hi = n;
    // r^d <= n implies r <= 2^(64/d); tighten the search window first.
    while (hi - lo > 1) {
        u64 mid = lo + (hi - lo) / 2;
        u128 acc = 1;
        bool over = false;
        for (unsigned i = 0; i < d && !over; ++i) {
            acc *= mid;
            if (acc > n) over = true;
        }
        if (over) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return lo;
}

}  // namespace cwpir
