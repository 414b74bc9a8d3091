#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwpir/bfv.hpp"
#include "cwpir/cw_code.hpp"
#include "cwpir/expansion.hpp"
#include "cwpir/he.hpp"

namespace cwpir {

enum class PirMode : std::uint8_t { index = 0, keyword = 1 };

/// Retrieval protocol configuration. In index mode the domain is the
/// row count; in keyword mode it is 2^keyword_bits (perfect mapping)
/// or unbounded (lossy mapping with an explicit code length).
struct PirConfig {
    PirMode mode = PirMode::index;
    u64 row_count = 0;         // n
    unsigned keyword_bits = 0; // log2 |S(ID)| in keyword mode
    bool lossy = false;        // hash-mapped identifiers
    unsigned hamming_weight = 0;  // k
    unsigned code_length = 0;     // m
    unsigned compression = 0;     // c
    std::size_t payload_bytes = 0;
    HeParams he;
    Seed256 lossy_seed;

    CodeSpec code_spec() const { return CodeSpec(code_length, hamming_weight); }
    /// Plaintexts per row: s = ceil(payload bits / (N * floor(log2 t))).
    std::size_t plaintexts_per_row() const;
    std::size_t plaintext_capacity_bytes() const;
    /// Upload ciphertext count h = ceil(m / 2^c).
    std::size_t upload_ciphertexts() const;

    void validate() const;
};

/// Smallest workable Hamming weight: the least k >= 2 whose tree depth
/// fits the parameter depth budget and whose code length stays
/// practical, advanced while an equal-depth successor strictly lowers
/// the upload.
unsigned choose_hamming_weight(const BigUint& domain_size, const HeParams& he);

/// Fully-specified config builders; pass k = 0 or c = UINT_MAX for the
/// module defaults.
PirConfig make_index_config(u64 rows, unsigned k, unsigned c, HeParams he,
                            std::size_t payload_bytes);
PirConfig make_keyword_config(u64 rows, unsigned keyword_bits, unsigned k, unsigned c,
                              HeParams he, std::size_t payload_bytes);
PirConfig make_lossy_keyword_config(u64 rows, unsigned code_length, unsigned k, unsigned c,
                                    HeParams he, std::size_t payload_bytes, Seed256 seed);

struct PirRow {
    std::vector<std::uint8_t> key;
    std::vector<std::uint8_t> payload;
};

/// Offline-processed database: payload chunks as R_t plaintexts plus
/// the precomputed codeword per identifier.
class PirDatabase {
public:
    static PirDatabase setup(std::vector<PirRow> rows, PirConfig config);

    const PirConfig& config() const { return config_; }
    std::size_t rows() const { return codewords_.size(); }
    std::size_t chunks_per_row() const { return chunks_.empty() ? 0 : chunks_[0].size(); }
    const Codeword& codeword(std::size_t row) const { return codewords_[row]; }
    const RingElement& chunk(std::size_t row, std::size_t j) const { return chunks_[row][j]; }
    const RingContextPtr& plain_context() const { return rt_; }

    /// Builds the NTT-form plaintext cache for a BFV server backend.
    void prepare_for(const BfvBackend& be) const;

    friend std::vector<CipherValue> inner_product(const HeBackend& be,
                                                  std::span<const CipherValue> sel,
                                                  const PirDatabase& db);

private:
    PirConfig config_;
    RingContextPtr rt_;
    std::vector<Codeword> codewords_;
    std::vector<std::vector<RingElement>> chunks_;
    // NTT plaintext cache, laid out [chunk][row] so inner products can
    // view one chunk column contiguously.
    mutable std::vector<std::vector<BfvBackend::PreparedPlain>> prepared_;
    mutable u64 prepared_fingerprint_ = 0;
};

/// Identifier mapping per config (perfect over the numeric domain,
/// lossy over byte strings).
Codeword map_index(u64 index, const PirConfig& config);
Codeword map_keyword(std::span<const std::uint8_t> key, const PirConfig& config);

/// Client query construction: map, pack with 2^{-c} scaling, encrypt.
PackedQuery build_query_index(const HeBackend& be, u64 index, const PirConfig& config);
PackedQuery build_query_keyword(const HeBackend& be, std::span<const std::uint8_t> key,
                                const PirConfig& config);

/// Selection vector: sel[i] = prod over row i's codeword positions of
/// the expanded query bits; n(k-1) ciphertext multiplications, rows in
/// parallel.
std::vector<CipherValue> compute_selection_vector(const HeBackend& be,
                                                  std::span<const CipherValue> expanded,
                                                  const PirDatabase& db);

/// response[j] = sum_i sel[i] * DB[i][j].
std::vector<CipherValue> inner_product(const HeBackend& be, std::span<const CipherValue> sel,
                                       const PirDatabase& db);

/// Full server stage: expansion, selection vector, inner product.
/// Responses are finalized to two-component ciphertexts.
std::vector<CipherValue> process_query(const HeBackend& be, const PackedQuery& query,
                                       const PirDatabase& db);

/// Client extraction; nullopt when the response is the all-zero
/// absent-keyword sentinel.
std::optional<std::vector<std::uint8_t>> extract(const HeBackend& be,
                                                 std::span<const CipherValue> response,
                                                 const PirConfig& config);

}  // namespace cwpir
