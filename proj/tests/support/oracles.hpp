#pragma once

// Test-only reference computations, kept independent of the library
// paths they check.

#include <cstdint>
#include <vector>

#include "cwpir/cw_code.hpp"
#include "cwpir/numeric.hpp"

namespace cwpir::test {

/// Negacyclic product by direct double loop with x^N = -1.
inline std::vector<u64> schoolbook_negacyclic(const std::vector<u64>& a,
                                              const std::vector<u64>& b, u64 q) {
    const std::size_t n = a.size();
    std::vector<u64> out(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const u64 p = static_cast<u64>((u128(a[i]) * b[j]) % q);
            const std::size_t k = i + j;
            if (k < n) {
                out[k] = (out[k] + p) % q;
            } else {
                out[k - n] = (out[k - n] + q - p) % q;
            }
        }
    }
    return out;
}

/// All weight-k bitmasks of m bits in ascending integer order
/// (colexicographic order on the index sets). Usable for m <= 24.
inline std::vector<u64> enumerate_weight_k_masks(unsigned m, unsigned k) {
    std::vector<u64> out;
    for (u64 mask = 0; mask < (u64(1) << m); ++mask) {
        if (static_cast<unsigned>(__builtin_popcountll(mask)) == k) out.push_back(mask);
    }
    return out;
}

inline u64 codeword_to_mask(const Codeword& cw) {
    u64 mask = 0;
    for (unsigned i = 0; i < cw.length(); ++i) {
        if (cw.bit(i)) mask |= u64(1) << i;
    }
    return mask;
}

}  // namespace cwpir::test
