#pragma once

#include <string>

#include "cwpir/cw_code.hpp"
#include "cwpir/he.hpp"

namespace cwpir {

/// Exact expansion-factor arithmetic: F = 2 * (ciphertext bits per
/// coefficient) / (usable plaintext bits per coefficient).
struct Rational {
    u64 num = 0;
    u64 den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

Rational expansion_factor_rational(const HeParams& params);

/// Closed-form protocol costs. Ciphertext-multiplication counts carry
/// both the product-notation bound and the balanced-tree actual.
struct CostReport {
    unsigned depth = 0;
    u64 query_bits = 0;
    u64 upload_cts = 0;
    u64 download_cts = 0;
    u64 pm_count = 0;
    u64 mul_count_bound = 0;
    u64 mul_count_actual = 0;
    u64 substitutions = 0;
};

CostReport cw_pir_cost(u64 rows, const BigUint& domain, unsigned k, u64 s, unsigned c);
CostReport folklore_pir_cost(u64 rows, const BigUint& domain, u64 s, unsigned c);
CostReport unary_pir_cost(u64 rows, const BigUint& domain, u64 s, unsigned c);
CostReport sealpir_cost(u64 rows, u64 domain, unsigned d, u64 s, Rational f);
CostReport mulpir_cost(u64 rows, u64 domain, unsigned d, u64 s);

/// d * ceil(|S|^(1/d)): the dimension-wise query encoding size.
u64 dimensionwise_bits(u64 domain, unsigned d);

/// Modeled wire sizes from the declared modulus widths: uploads are
/// seed-compressed fresh ciphertexts, downloads two-component
/// ciphertexts at the last modulus level.
struct SizeModel {
    u64 upload_bytes_per_ct = 0;
    u64 download_bytes_per_ct = 0;
};
SizeModel modeled_sizes(const HeParams& params);

/// Built-in comparison tables, emitted as CSV.
///   2: equality-operator circuit properties
///   4: PIR protocol cost formulas (numeric for the given n, s, F)
///   7: query bit-length by domain size, constant-weight vs
///      dimension-wise encodings
std::string equality_operator_table_csv();
std::string pir_cost_table_csv(u64 rows, u64 s, Rational f);
std::string query_bitlength_table_csv();

}  // namespace cwpir
