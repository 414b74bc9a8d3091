#include "cwpir/cost_model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cwpir {

Rational expansion_factor_rational(const HeParams& params) {
    return Rational{2 * u64(params.declared_q_bits()), u64(params.plain_bits_per_coeff())};
}

namespace {

u64 ceil_root(u64 n, unsigned d) {
    const u64 r = integer_root(n, d);
    u128 acc = 1;
    for (unsigned i = 0; i < d; ++i) acc *= r;
    return acc >= n ? r : r + 1;
}

u64 upload_count(u64 query_bits, unsigned c) {
    const u64 chunk = u64(1) << c;
    return (query_bits + chunk - 1) / chunk;
}

u64 ceil_div(u128 a, u128 b) { return static_cast<u64>((a + b - 1) / b); }

}  // namespace

CostReport cw_pir_cost(u64 rows, const BigUint& domain, unsigned k, u64 s, unsigned c) {
    CostReport r;
    r.depth = ceil_log2(k);
    r.query_bits = min_code_length(domain, k);
    r.upload_cts = upload_count(r.query_bits, c);
    r.download_cts = s;
    r.pm_count = rows * s;
    r.mul_count_bound = rows * k;
    r.mul_count_actual = rows * (k - 1);
    r.substitutions = r.upload_cts * ((u64(1) << c) - 1);
    return r;
}

CostReport folklore_pir_cost(u64 rows, const BigUint& domain, u64 s, unsigned c) {
    CostReport r;
    // ceil(log2 domain); bit_length() is floor(log2) + 1.
    const unsigned bits = domain.bit_length();
    const unsigned l =
        std::max(1u, (BigUint(1) << (bits - 1)) == domain ? bits - 1 : bits);
    r.depth = ceil_log2(l);
    r.query_bits = l;
    r.upload_cts = upload_count(r.query_bits, c);
    r.download_cts = s;
    r.pm_count = rows * s;
    r.mul_count_bound = rows * u64(l);
    r.mul_count_actual = rows * u64(l - 1);
    r.substitutions = r.upload_cts * ((u64(1) << c) - 1);
    return r;
}

CostReport unary_pir_cost(u64 rows, const BigUint& domain, u64 s, unsigned c) {
    CostReport r;
    r.depth = 0;
    r.query_bits = domain.to_u64_saturating();
    r.upload_cts = upload_count(r.query_bits, c);
    r.download_cts = s;
    r.pm_count = rows * s;
    r.mul_count_bound = 0;
    r.mul_count_actual = 0;
    r.substitutions = r.upload_cts * ((u64(1) << c) - 1);
    return r;
}

CostReport sealpir_cost(u64 rows, u64 domain, unsigned d, u64 s, Rational f) {
    if (d < 1) throw std::invalid_argument("recursion level must be >= 1");
    CostReport r;
    r.depth = d - 1;
    const u64 root = ceil_root(domain, d);
    r.query_bits = u64(d) * root;
    const u64 row_root = ceil_root(rows, d);
    // sum_{i=0}^{d-1} n^{(d-i)/d} F^i, each term rounded up.
    u128 pm = 0;
    for (unsigned i = 0; i < d; ++i) {
        u128 base = 1;
        for (unsigned j = 0; j < d - i; ++j) base *= row_root;
        u128 fnum = 1, fden = 1;
        for (unsigned j = 0; j < i; ++j) {
            fnum *= f.num;
            fden *= f.den;
        }
        pm += ceil_div(base * fnum, fden);
    }
    r.pm_count = static_cast<u64>(pm) * s;
    r.mul_count_bound = 0;
    r.mul_count_actual = 0;
    // download F^{d-1} * s ciphertexts.
    u128 fnum = 1, fden = 1;
    for (unsigned j = 0; j + 1 < d; ++j) {
        fnum *= f.num;
        fden *= f.den;
    }
    r.download_cts = ceil_div(fnum * s, fden);
    r.upload_cts = d;
    return r;
}

CostReport mulpir_cost(u64 rows, u64 domain, unsigned d, u64 s) {
    if (d < 1) throw std::invalid_argument("recursion level must be >= 1");
    CostReport r;
    r.depth = d - 1;
    r.query_bits = u64(d) * ceil_root(domain, d);
    const u64 root = ceil_root(rows, d);
    u128 muls = 0;
    for (unsigned i = 1; i < d; ++i) {
        u128 term = 1;
        for (unsigned j = 0; j < d - i; ++j) term *= root;
        muls += term;
    }
    r.pm_count = rows * s;
    r.mul_count_bound = static_cast<u64>(muls) * s;
    r.mul_count_actual = r.mul_count_bound;
    r.download_cts = s;
    r.upload_cts = d;
    return r;
}

u64 dimensionwise_bits(u64 domain, unsigned d) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    return u64(d) * ceil_root(domain, d);
}

SizeModel modeled_sizes(const HeParams& params) {
    SizeModel m;
    const u64 total_bits = params.declared_q_bits();
    const u64 last_bits = params.declared_coeff_bits.back();
    m.upload_bytes_per_ct = params.degree * total_bits / 8 + 32;  // seed-compressed
    m.download_bytes_per_ct = 2 * params.degree * last_bits / 8;
    return m;
}

std::string equality_operator_table_csv() {
    std::ostringstream out;
    out << "operator,domain,operations,mult_depth,tree_mults,condition\n";
    out << "plain-folklore,binary-l,l*M,ceil(log2 l),l-1,l >= log2 n\n";
    out << "plain-cw,CW(m;k),k*M,ceil(log2 k),k-1,C(m;k) >= n\n";
    out << "arith-folklore,binary-l,2l*M,1+ceil(log2 l),2l-1,l >= log2 n\n";
    out << "arith-cw,CW(m;k),PM+(m+k)*M,1+ceil(log2 k),m+k-1,C(m;k) >= n\n";
    return out.str();
}

std::string pir_cost_table_csv(u64 rows, u64 s, Rational f) {
    std::ostringstream out;
    out << "method,mult_depth,query_bits,pm_count,mul_count,download_cts\n";
    for (unsigned d : {1u, 2u, 3u}) {
        auto r = sealpir_cost(rows, rows, d, s, f);
        out << "sealpir-d" << d << "," << r.depth << "," << r.query_bits << "," << r.pm_count
            << ",0," << r.download_cts << "\n";
    }
    for (unsigned d : {1u, 2u, 3u}) {
        auto r = mulpir_cost(rows, rows, d, s);
        out << "mulpir-d" << d << "," << r.depth << "," << r.query_bits << "," << r.pm_count
            << "," << r.mul_count_bound << "," << r.download_cts << "\n";
    }
    {
        auto r = folklore_pir_cost(rows, BigUint(rows), s, 0);
        out << "folklore," << r.depth << "," << r.query_bits << "," << r.pm_count << ","
            << r.mul_count_bound << "," << r.download_cts << "\n";
    }
    for (unsigned k : {2u, 3u, 4u}) {
        auto r = cw_pir_cost(rows, BigUint(rows), k, s, 0);
        out << "cw-k" << k << "," << r.depth << "," << r.query_bits << "," << r.pm_count << ","
            << r.mul_count_bound << "," << r.download_cts << "\n";
    }
    return out.str();
}

std::string query_bitlength_table_csv() {
    std::ostringstream out;
    out << "domain_bits,k1,k2,k3,k4,d1,d2,d3\n";
    for (unsigned bits = 4; bits <= 48; bits += 2) {
        const BigUint domain = BigUint(1) << bits;
        out << bits;
        // k = 1 (and d = 1) entries grow linearly and are omitted past 2^18.
        if (bits < 20) {
            out << "," << min_code_length(domain, 1);
        } else {
            out << ",-";
        }
        if (bits < 40) {
            out << "," << min_code_length(domain, 2);
        } else {
            out << ",-";
        }
        out << "," << min_code_length(domain, 3);
        out << "," << min_code_length(domain, 4);
        if (bits < 20) {
            out << "," << dimensionwise_bits(u64(1) << bits, 1);
        } else {
            out << ",-";
        }
        if (bits < 40) {
            out << "," << dimensionwise_bits(u64(1) << bits, 2);
        } else {
            out << ",-";
        }
        out << "," << dimensionwise_bits(u64(1) << bits, 3);
        out << "\n";
    }
    return out.str();
}

}  // namespace cwpir
