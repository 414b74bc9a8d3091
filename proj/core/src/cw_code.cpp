#include "cwpir/cw_code.hpp"

#include <bit>
#include <stdexcept>

namespace cwpir {

CodeSpec::CodeSpec(unsigned m, unsigned k) : length(m), weight(k) {
    if (k < 1 || k > m) throw std::invalid_argument("CodeSpec requires 1 <= k <= m");
}

unsigned Codeword::weight() const {
    unsigned w = 0;
    for (u64 word : words_) w += static_cast<unsigned>(std::popcount(word));
    return w;
}

std::vector<unsigned> Codeword::positions() const {
    std::vector<unsigned> out;
    for (unsigned i = 0; i < length_; ++i) {
        if (bit(i)) out.push_back(i);
    }
    return out;
}

int Codeword::compare_as_integer(const Codeword& o) const {
    if (length_ != o.length_) return length_ < o.length_ ? -1 : 1;
    for (std::size_t w = words_.size(); w-- > 0;) {
        if (words_[w] != o.words_[w]) return words_[w] < o.words_[w] ? -1 : 1;
    }
    return 0;
}

unsigned min_code_length(const BigUint& n, unsigned k) {
    if (k < 1) throw std::invalid_argument("min_code_length: k must be >= 1");
    if (n.is_zero()) throw std::invalid_argument("min_code_length: n must be >= 1");
    constexpr unsigned kLimit = 1u << 24;
    // row[j] = C(m, j); start at m = k where C(k, k) = 1.
    std::vector<BigUint> row(k + 1);
    row[0] = BigUint(1);
    for (unsigned j = 1; j <= k; ++j) row[j] = BigUint();
    row[k] = BigUint(1);
    // Fill row for m = k exactly: C(k, j).
    for (unsigned j = 1; j < k; ++j) row[j] = binomial(k, j);
    unsigned m = k;
    while (row[k] < n) {
        if (++m > kLimit) throw std::runtime_error("min_code_length: length limit exceeded");
        for (unsigned j = k; j >= 1; --j) {
            row[j] += row[j - 1];
        }
    }
    return m;
}

unsigned min_code_length(u64 n, unsigned k) { return min_code_length(BigUint(n), k); }

namespace {

// Builds row[j] = C(m, j) for j = 0..k via the exact multiplicative
// recurrence (each division is exact).
std::vector<BigUint> binomial_row(unsigned m, unsigned k) {
    std::vector<BigUint> row(k + 1);
    row[0] = BigUint(1);
    for (unsigned j = 1; j <= k; ++j) {
        if (j > m) {
            row[j] = BigUint();
            continue;
        }
        BigUint v = row[j - 1];
        v.mul_u64(m - j + 1);
        BigUint q, r;
        BigUint::divmod(v, BigUint(j), q, r);
        row[j] = q;
    }
    return row;
}

}  // namespace

Codeword perfect_map(const BigUint& x, const CodeSpec& spec) {
    const unsigned m = spec.length, k = spec.weight;
    if (!(x < spec.capacity())) throw std::invalid_argument("perfect_map: input out of range");
    BigUint r = x;
    unsigned h = k;
    Codeword y(m);
    // row[j] = C(m', j), maintained as m' descends.
    std::vector<BigUint> row = binomial_row(m - 1, k);
    for (unsigned mp = m; mp-- > 0;) {
        if (r >= row[h]) {
            y.set_bit(mp);
            r -= row[h];
            --h;
            if (h == 0) break;
        }
        if (mp > 0) {
            // C(m'-1, j) = C(m', j) - C(m'-1, j-1), ascending j so that
            // row[j-1] is already updated when row[j] is touched.
            for (unsigned j = 1; j <= h; ++j) row[j] -= row[j - 1];
        }
    }
    return y;
}

Codeword perfect_map(u64 x, const CodeSpec& spec) { return perfect_map(BigUint(x), spec); }

BigUint perfect_unmap(const Codeword& y, const CodeSpec& spec) {
    const unsigned m = spec.length, k = spec.weight;
    if (y.length() != m) throw std::invalid_argument("perfect_unmap: length mismatch");
    if (y.weight() != k) throw std::invalid_argument("perfect_unmap: wrong Hamming weight");
    BigUint x;
    unsigned h = 1;
    // row[j] = C(m', j), maintained as m' ascends from 0.
    std::vector<BigUint> row(k + 2);
    row[0] = BigUint(1);
    for (unsigned mp = 0; mp < m; ++mp) {
        if (y.bit(mp)) {
            x += row[h];
            ++h;
        }
        // C(m'+1, j) = C(m', j) + C(m', j-1), descending j.
        unsigned hi = std::min<unsigned>(k + 1, mp + 1);
        for (unsigned j = hi; j >= 1; --j) row[j] += row[j - 1];
    }
    return x;
}

Codeword lossy_map(std::span<const std::uint8_t> input, const CodeSpec& spec, const Seed256& seed) {
    const unsigned m = spec.length, k = spec.weight;
    Codeword y(m);
    unsigned cnt = 0;
    const u64 cap = u64(64) * m;
    for (u64 i = 1; cnt < k; ++i) {
        if (i > cap) throw std::runtime_error("lossy_map: draw limit exceeded");
        // One hash function per index i, keyed off the shared seed.
        const u64 k0 = seed.words[0] ^ (i * 0x9e3779b97f4a7c15ULL);
        const u64 k1 = seed.words[1];
        const unsigned pos = static_cast<unsigned>(siphash24(k0, k1, input) % m);
        if (!y.bit(pos)) {
            y.set_bit(pos);
            ++cnt;
        }
    }
    return y;
}

}  // namespace cwpir
