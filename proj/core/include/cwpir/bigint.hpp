#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cwpir/numeric.hpp"

namespace cwpir {

/// Unsigned arbitrary-precision integer, little-endian 64-bit limbs.
/// Sized for parameter setup, binomial tables and exact ciphertext
/// scaling support; not a general-purpose bignum library.
class BigUint {
public:
    BigUint() = default;
    explicit BigUint(u64 v) {
        if (v) limbs_.push_back(v);
    }
    static BigUint from_u128(u128 v);

    bool is_zero() const { return limbs_.empty(); }
    std::size_t limb_count() const { return limbs_.size(); }
    u64 limb(std::size_t i) const { return i < limbs_.size() ? limbs_[i] : 0; }
    const std::vector<u64>& limbs() const { return limbs_; }

    /// Number of significant bits (0 for zero).
    unsigned bit_length() const;
    bool bit(unsigned i) const;

    u64 to_u64_saturating() const;
    u64 mod_u64(u64 m) const;
    double to_double() const;
    std::string to_string() const;  // decimal

    int compare(const BigUint& o) const;
    bool operator==(const BigUint& o) const { return limbs_ == o.limbs_; }
    bool operator!=(const BigUint& o) const { return !(*this == o); }
    bool operator<(const BigUint& o) const { return compare(o) < 0; }
    bool operator<=(const BigUint& o) const { return compare(o) <= 0; }
    bool operator>(const BigUint& o) const { return compare(o) > 0; }
    bool operator>=(const BigUint& o) const { return compare(o) >= 0; }

    BigUint operator+(const BigUint& o) const;
    BigUint operator-(const BigUint& o) const;  // requires *this >= o
    BigUint operator*(const BigUint& o) const;
    BigUint operator<<(unsigned bits) const;
    BigUint operator>>(unsigned bits) const;

    BigUint& operator+=(const BigUint& o);
    BigUint& operator-=(const BigUint& o);

    BigUint& mul_u64(u64 v);
    BigUint& add_u64(u64 v);

    /// this += other * scalar; the workhorse of CRT reconstruction.
    void add_scaled(const BigUint& other, u64 scalar);

    /// Quotient and remainder; divisor must be nonzero.
    static void divmod(const BigUint& num, const BigUint& den, BigUint& quot, BigUint& rem);
    BigUint operator/(const BigUint& o) const;
    BigUint operator%(const BigUint& o) const;

private:
    void trim();
    std::vector<u64> limbs_;
};

/// Exact binomial coefficient via Pascal row iteration.
BigUint binomial(unsigned m, unsigned k);

}  // namespace cwpir
