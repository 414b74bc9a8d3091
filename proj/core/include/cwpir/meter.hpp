#pragma once

#include <atomic>

#include "cwpir/numeric.hpp"

namespace cwpir {

/// Operation tallies in the paper-facing categories: additions,
/// plaintext multiplications (PM), ciphertext multiplications (M)
/// and substitutions.
struct OpCounts {
    u64 add = 0;
    u64 plain_mul = 0;
    u64 mul = 0;
    u64 substitute = 0;

    OpCounts operator+(const OpCounts& o) const {
        return {add + o.add, plain_mul + o.plain_mul, mul + o.mul, substitute + o.substitute};
    }
    OpCounts operator-(const OpCounts& o) const {
        return {add - o.add, plain_mul - o.plain_mul, mul - o.mul, substitute - o.substitute};
    }
    bool operator==(const OpCounts&) const = default;
};

/// Per-value meter. `counts` accumulates over the value's lineage
/// (exact for circuit trees; shared subexpressions are charged once
/// per use). `depth` is the ciphertext-ciphertext multiplicative
/// depth: products take 1 + max of the factor depths, additions take
/// the max, plain multiplications and substitutions leave it alone.
struct OpMeter {
    OpCounts counts;
    unsigned depth = 0;
};

/// Backend-wide execution counter; counts operations as they run,
/// independent of value lineage. Thread-safe.
class OpCounter {
public:
    void record_add() { add_.fetch_add(1, std::memory_order_relaxed); }
    void record_plain_mul() { plain_mul_.fetch_add(1, std::memory_order_relaxed); }
    void record_mul() { mul_.fetch_add(1, std::memory_order_relaxed); }
    void record_substitute() { substitute_.fetch_add(1, std::memory_order_relaxed); }

    OpCounts snapshot() const {
        return {add_.load(), plain_mul_.load(), mul_.load(), substitute_.load()};
    }
    void reset() {
        add_ = 0;
        plain_mul_ = 0;
        mul_ = 0;
        substitute_ = 0;
    }

private:
    std::atomic<u64> add_{0}, plain_mul_{0}, mul_{0}, substitute_{0};
};

}  // namespace cwpir
