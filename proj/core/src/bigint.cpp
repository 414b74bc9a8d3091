#include "cwpir/bigint.hpp"

#include <algorithm>
#include <stdexcept>

namespace cwpir {

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint BigUint::from_u128(u128 v) {
    BigUint r;
    if (v) r.limbs_.push_back(static_cast<u64>(v));
    if (v >> 64) r.limbs_.push_back(static_cast<u64>(v >> 64));
    return r;
}

unsigned BigUint::bit_length() const {
    if (limbs_.empty()) return 0;
    u64 top = limbs_.back();
    unsigned b = 0;
    while (top) {
        top >>= 1;
        ++b;
    }
    return static_cast<unsigned>((limbs_.size() - 1) * 64) + b;
}

bool BigUint::bit(unsigned i) const {
    std::size_t l = i / 64;
    if (l >= limbs_.size()) return false;
    return (limbs_[l] >> (i % 64)) & 1;
}

u64 BigUint::to_u64_saturating() const {
    if (limbs_.empty()) return 0;
    if (limbs_.size() > 1) return ~u64(0);
    return limbs_[0];
}

u64 BigUint::mod_u64(u64 m) const {
    u64 r = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        r = static_cast<u64>(((u128(r) << 64) | limbs_[i]) % m);
    }
    return r;
}

double BigUint::to_double() const {
    double r = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        r = r * 18446744073709551616.0 + static_cast<double>(limbs_[i]);
    }
    return r;
}

std::string BigUint::to_string() const {
    if (is_zero()) return "0";
    BigUint tmp = *this;
    std::string out;
    const BigUint ten(10);
    BigUint q, r;
    while (!tmp.is_zero()) {
        divmod(tmp, ten, q, r);
        out.push_back(static_cast<char>('0' + r.to_u64_saturating()));
        tmp = q;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

int BigUint::compare(const BigUint& o) const {
    if (limbs_.size() != o.limbs_.size()) return limbs_.size() < o.limbs_.size() ? -1 : 1;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
    }
    return 0;
}

BigUint& BigUint::operator+=(const BigUint& o) {
    if (limbs_.size() < o.limbs_.size()) limbs_.resize(o.limbs_.size(), 0);
    u64 carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        u64 add = i < o.limbs_.size() ? o.limbs_[i] : 0;
        if (add == 0 && carry == 0) break;
        u128 s = u128(limbs_[i]) + add + carry;
        limbs_[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
    }
    if (carry) limbs_.push_back(carry);
    return *this;
}

BigUint BigUint::operator+(const BigUint& o) const {
    BigUint r = *this;
    r += o;
    return r;
}

BigUint& BigUint::operator-=(const BigUint& o) {
    if (compare(o) < 0) throw std::invalid_argument("BigUint subtraction underflow");
    u64 borrow = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        u128 need = u128(i < o.limbs_.size() ? o.limbs_[i] : 0) + borrow;
        if (need == 0) break;
        u64 cur = limbs_[i];
        limbs_[i] = cur - static_cast<u64>(need);
        borrow = (u128(cur) < need) ? 1 : 0;
    }
    trim();
    return *this;
}

BigUint BigUint::operator-(const BigUint& o) const {
    BigUint r = *this;
    r -= o;
    return r;
}

BigUint BigUint::operator*(const BigUint& o) const {
    if (is_zero() || o.is_zero()) return BigUint();
    BigUint r;
    r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        u64 carry = 0;
        for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
            u128 cur = u128(limbs_[i]) * o.limbs_[j] + r.limbs_[i + j] + carry;
            r.limbs_[i + j] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
        r.limbs_[i + o.limbs_.size()] += carry;
    }
    r.trim();
    return r;
}

BigUint BigUint::operator<<(unsigned bits) const {
    if (is_zero()) return BigUint();
    unsigned limb_shift = bits / 64, bit_shift = bits % 64;
    BigUint r;
    r.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        r.limbs_[i + limb_shift] |= bit_shift ? (limbs_[i] << bit_shift) : limbs_[i];
        if (bit_shift) r.limbs_[i + limb_shift + 1] |= limbs_[i] >> (64 - bit_shift);
    }
    r.trim();
    return r;
}

BigUint BigUint::operator>>(unsigned bits) const {
    unsigned limb_shift = bits / 64, bit_shift = bits % 64;
    if (limb_shift >= limbs_.size()) return BigUint();
    BigUint r;
    r.limbs_.assign(limbs_.size() - limb_shift, 0);
    for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
        r.limbs_[i] = limbs_[i + limb_shift] >> bit_shift;
        if (bit_shift && i + limb_shift + 1 < limbs_.size()) {
            r.limbs_[i] |= limbs_[i + limb_shift + 1] << (64 - bit_shift);
        }
    }
    r.trim();
    return r;
}

BigUint& BigUint::mul_u64(u64 v) {
    if (v == 0 || is_zero()) {
        limbs_.clear();
        return *this;
    }
    u64 carry = 0;
    for (auto& l : limbs_) {
        u128 cur = u128(l) * v + carry;
        l = static_cast<u64>(cur);
        carry = static_cast<u64>(cur >> 64);
    }
    if (carry) limbs_.push_back(carry);
    return *this;
}

BigUint& BigUint::add_u64(u64 v) {
    u64 carry = v;
    std::size_t i = 0;
    while (carry) {
        if (i == limbs_.size()) {
            limbs_.push_back(carry);
            break;
        }
        u128 s = u128(limbs_[i]) + carry;
        limbs_[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
        ++i;
    }
    return *this;
}

void BigUint::add_scaled(const BigUint& other, u64 scalar) {
    if (scalar == 0 || other.is_zero()) return;
    if (limbs_.size() < other.limbs_.size() + 1) limbs_.resize(other.limbs_.size() + 1, 0);
    u64 carry = 0;
    std::size_t i = 0;
    for (; i < other.limbs_.size(); ++i) {
        u128 cur = u128(other.limbs_[i]) * scalar + limbs_[i] + carry;
        limbs_[i] = static_cast<u64>(cur);
        carry = static_cast<u64>(cur >> 64);
    }
    while (carry) {
        if (i == limbs_.size()) limbs_.push_back(0);
        u128 s = u128(limbs_[i]) + carry;
        limbs_[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
        ++i;
    }
    trim();
}

namespace {

// Knuth algorithm D on 64-bit limbs. The divisor is normalized so its
// top limb has the high bit set, which bounds the 2-by-1 quotient
// estimate error by 2.
void divmod_long(const std::vector<u64>& num, const std::vector<u64>& den,
                 std::vector<u64>& quot, std::vector<u64>& rem) {
    const std::size_t n = den.size(), m = num.size() - n;
    quot.assign(m + 1, 0);
    std::vector<u64> u = num;
    u.push_back(0);
    const u64 d1 = den[n - 1];
    const u64 d2 = n >= 2 ? den[n - 2] : 0;
    for (std::size_t j = m + 1; j-- > 0;) {
        u128 top = (u128(u[j + n]) << 64) | u[j + n - 1];
        u128 qhat = top / d1;
        u128 rhat = top % d1;
        if (qhat > ~u64(0)) {
            qhat = ~u64(0);
            rhat = top - qhat * d1;
        }
        while (rhat <= ~u64(0) &&
               qhat * d2 > ((rhat << 64) | (n >= 2 ? u[j + n - 2] : 0))) {
            --qhat;
            rhat += d1;
        }
        // u[j..j+n] -= qhat * den, tracking the final sign.
        u64 mul_carry = 0, borrow = 0;
        for (std::size_t i = 0; i < n; ++i) {
            u128 p = u128(static_cast<u64>(qhat)) * den[i] + mul_carry;
            mul_carry = static_cast<u64>(p >> 64);
            u128 need = u128(static_cast<u64>(p)) + borrow;
            u64 cur = u[i + j];
            u[i + j] = cur - static_cast<u64>(need);
            borrow = (u128(cur) < need) ? 1 : 0;
        }
        u128 need = u128(mul_carry) + borrow;
        u64 cur = u[j + n];
        u[j + n] = cur - static_cast<u64>(need);
        bool went_negative = u128(cur) < need;
        if (went_negative) {
            --qhat;
            u64 c = 0;
            for (std::size_t i = 0; i < n; ++i) {
                u128 s = u128(u[i + j]) + den[i] + c;
                u[i + j] = static_cast<u64>(s);
                c = static_cast<u64>(s >> 64);
            }
            u[j + n] += c;
        }
        quot[j] = static_cast<u64>(qhat);
    }
    rem.assign(u.begin(), u.begin() + n);
}

}  // namespace

void BigUint::divmod(const BigUint& num, const BigUint& den, BigUint& quot, BigUint& rem) {
    if (den.is_zero()) throw std::invalid_argument("BigUint division by zero");
    if (num.compare(den) < 0) {
        rem = num;
        quot = BigUint();
        return;
    }
    if (den.limbs_.size() == 1) {
        u64 d = den.limbs_[0];
        std::vector<u64> q(num.limbs_.size(), 0);
        u64 r = 0;
        for (std::size_t i = num.limbs_.size(); i-- > 0;) {
            u128 cur = (u128(r) << 64) | num.limbs_[i];
            q[i] = static_cast<u64>(cur / d);
            r = static_cast<u64>(cur % d);
        }
        quot.limbs_ = std::move(q);
        quot.trim();
        rem = BigUint(r);
        return;
    }
    unsigned shift = 0;
    u64 top = den.limbs_.back();
    while ((top & (u64(1) << 63)) == 0) {
        top <<= 1;
        ++shift;
    }
    BigUint nn = num << shift;
    BigUint nd = den << shift;
    if (nn.limbs_.size() < nd.limbs_.size() + 1) nn.limbs_.resize(nd.limbs_.size() + 1, 0);
    std::vector<u64> q, r;
    divmod_long(nn.limbs_, nd.limbs_, q, r);
    quot.limbs_ = std::move(q);
    quot.trim();
    BigUint shifted_rem;
    shifted_rem.limbs_ = std::move(r);
    shifted_rem.trim();
    rem = shifted_rem >> shift;
}

BigUint BigUint::operator/(const BigUint& o) const {
    BigUint q, r;
    divmod(*this, o, q, r);
    return q;
}

BigUint BigUint::operator%(const BigUint& o) const {
    BigUint q, r;
    divmod(*this, o, q, r);
    return r;
}

BigUint binomial(unsigned m, unsigned k) {
    if (k > m) return BigUint();
    if (m - k < k) k = m - k;
    if (k == 0) return BigUint(1);
    // Row iteration C(i, 0..k); O(m*k) adds, no shared state.
    std::vector<BigUint> row(k + 1);
    row[0] = BigUint(1);
    for (unsigned i = 1; i <= m; ++i) {
        unsigned hi = std::min(i, k);
        for (unsigned j = hi; j >= 1; --j) {
            if (j == i) {
                row[j] = BigUint(1);
            } else {
                row[j] += row[j - 1];
            }
        }
    }
    return row[k];
}

}  // namespace cwpir
