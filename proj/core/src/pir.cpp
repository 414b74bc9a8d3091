#include "cwpir/pir.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

#include "cwpir/eq_circuits.hpp"
#include "cwpir/parallel.hpp"

namespace cwpir {

namespace {

constexpr unsigned kMaxPracticalCodeLength = 1u << 22;

BigUint domain_size_of(const PirConfig& c) {
    if (c.mode == PirMode::index) return BigUint(c.row_count);
    return BigUint(1) << c.keyword_bits;
}

u64 keyword_value(std::span<const std::uint8_t> key, unsigned keyword_bits) {
    if (key.size() > 8) throw std::invalid_argument("numeric keyword longer than 8 bytes");
    u64 v = 0;
    for (std::size_t i = key.size(); i-- > 0;) v = (v << 8) | key[i];
    if (keyword_bits < 64 && v >= (u64(1) << keyword_bits)) {
        throw std::invalid_argument("keyword outside the configured domain");
    }
    return v;
}

}  // namespace

std::size_t PirConfig::plaintext_capacity_bytes() const {
    const std::size_t bits = he.degree * he.plain_bits_per_coeff();
    return bits / 8;
}

std::size_t PirConfig::plaintexts_per_row() const {
    const std::size_t cap_bits = he.degree * he.plain_bits_per_coeff();
    const std::size_t need_bits = payload_bytes * 8;
    return std::max<std::size_t>(1, (need_bits + cap_bits - 1) / cap_bits);
}

std::size_t PirConfig::upload_ciphertexts() const {
    const u64 chunk = u64(1) << compression;
    return (code_length + chunk - 1) / chunk;
}

void PirConfig::validate() const {
    if (row_count == 0) throw std::invalid_argument("empty database");
    if (hamming_weight < 1) throw std::invalid_argument("hamming weight must be >= 1");
    if (he.plain_modulus <= hamming_weight) {
        throw std::invalid_argument("plaintext modulus must exceed the Hamming weight");
    }
    if ((u64(1) << compression) > he.degree) {
        throw std::invalid_argument("compression factor exceeds log2(N)");
    }
    const CodeSpec spec = code_spec();
    if (!lossy && spec.capacity() < domain_size_of(*this)) {
        throw std::invalid_argument("code capacity below the identifier domain");
    }
    if (BigUint(row_count) > spec.capacity()) {
        throw std::invalid_argument("more rows than codewords");
    }
}

unsigned choose_hamming_weight(const BigUint& domain_size, const HeParams& he) {
    const unsigned max_c = log2_exact(he.degree);
    auto upload_for = [&](unsigned k) -> std::optional<u64> {
        if (binomial(kMaxPracticalCodeLength, k) < domain_size) return std::nullopt;
        const unsigned m = min_code_length(domain_size, k);
        const unsigned c = std::min(ceil_log2(m), max_c);
        return (m + (u64(1) << c) - 1) >> c;
    };
    std::optional<unsigned> chosen;
    for (unsigned k = 2; k <= 64; ++k) {
        if (ceil_log2(k) > he.depth_cap) break;
        auto h = upload_for(k);
        if (!h) continue;
        if (!chosen) {
            chosen = k;
            continue;
        }
        // Advance only while an equal-depth successor strictly lowers
        // the upload.
        if (ceil_log2(k) == ceil_log2(*chosen) && k == *chosen + 1) {
            auto prev = upload_for(*chosen);
            if (prev && *h < *prev) chosen = k;
        }
    }
    if (!chosen) throw std::invalid_argument("no workable Hamming weight for this domain");
    return *chosen;
}

namespace {

PirConfig finish_config(PirConfig cfg, unsigned k, unsigned c, const BigUint& domain) {
    cfg.hamming_weight = k ? k : choose_hamming_weight(domain, cfg.he);
    if (cfg.code_length == 0) cfg.code_length = min_code_length(domain, cfg.hamming_weight);
    const unsigned max_c = log2_exact(cfg.he.degree);
    cfg.compression =
        (c == std::numeric_limits<unsigned>::max()) ? std::min(ceil_log2(cfg.code_length), max_c)
                                                    : c;
    cfg.validate();
    return cfg;
}

}  // namespace

PirConfig make_index_config(u64 rows, unsigned k, unsigned c, HeParams he,
                            std::size_t payload_bytes) {
    PirConfig cfg;
    cfg.mode = PirMode::index;
    cfg.row_count = rows;
    cfg.payload_bytes = payload_bytes;
    cfg.he = std::move(he);
    return finish_config(std::move(cfg), k, c, BigUint(rows));
}

PirConfig make_keyword_config(u64 rows, unsigned keyword_bits, unsigned k, unsigned c,
                              HeParams he, std::size_t payload_bytes) {
    if (keyword_bits == 0 || keyword_bits > 64) {
        throw std::invalid_argument("keyword bit-length must be in [1, 64]");
    }
    PirConfig cfg;
    cfg.mode = PirMode::keyword;
    cfg.row_count = rows;
    cfg.keyword_bits = keyword_bits;
    cfg.payload_bytes = payload_bytes;
    cfg.he = std::move(he);
    return finish_config(std::move(cfg), k, c, BigUint(1) << keyword_bits);
}

PirConfig make_lossy_keyword_config(u64 rows, unsigned code_length, unsigned k, unsigned c,
                                    HeParams he, std::size_t payload_bytes, Seed256 seed) {
    PirConfig cfg;
    cfg.mode = PirMode::keyword;
    cfg.lossy = true;
    cfg.row_count = rows;
    cfg.code_length = code_length;
    cfg.payload_bytes = payload_bytes;
    cfg.he = std::move(he);
    cfg.lossy_seed = seed;
    if (k == 0) throw std::invalid_argument("lossy configs need an explicit Hamming weight");
    return finish_config(std::move(cfg), k, c, BigUint(rows));
}

Codeword map_index(u64 index, const PirConfig& config) {
    if (config.mode != PirMode::index) throw std::invalid_argument("config is not index mode");
    if (index >= config.row_count) throw std::invalid_argument("index outside the database");
    return perfect_map(index, config.code_spec());
}

Codeword map_keyword(std::span<const std::uint8_t> key, const PirConfig& config) {
    if (config.mode != PirMode::keyword) throw std::invalid_argument("config is not keyword mode");
    if (config.lossy) return lossy_map(key, config.code_spec(), config.lossy_seed);
    return perfect_map(keyword_value(key, config.keyword_bits), config.code_spec());
}

namespace {

std::vector<std::uint8_t> codeword_bits(const Codeword& cw) {
    std::vector<std::uint8_t> bits(cw.length());
    for (unsigned i = 0; i < cw.length(); ++i) bits[i] = cw.bit(i) ? 1 : 0;
    return bits;
}

/// Splits a payload into s plaintexts: b = floor(log2 t) bits per
/// coefficient, N coefficients per plaintext, zero padded.
std::vector<RingElement> chunk_payload(std::span<const std::uint8_t> payload,
                                       const PirConfig& config, const RingContextPtr& rt) {
    const unsigned b = config.he.plain_bits_per_coeff();
    const std::size_t n = rt->degree();
    const std::size_t s = config.plaintexts_per_row();
    std::vector<RingElement> out;
    std::size_t bit_pos = 0;
    const std::size_t total_bits = payload.size() * 8;
    for (std::size_t chunk_idx = 0; chunk_idx < s; ++chunk_idx) {
        std::vector<u64> coeffs(n, 0);
        for (std::size_t j = 0; j < n; ++j) {
            u64 v = 0;
            for (unsigned bi = 0; bi < b; ++bi, ++bit_pos) {
                if (bit_pos < total_bits && (payload[bit_pos / 8] >> (bit_pos % 8)) & 1) {
                    v |= u64(1) << bi;
                }
            }
            coeffs[j] = v;
        }
        out.push_back(RingElement::from_coeffs(rt, std::move(coeffs)));
    }
    return out;
}

std::vector<std::uint8_t> unchunk_payload(std::span<const RingElement> chunks,
                                          const PirConfig& config) {
    const unsigned b = config.he.plain_bits_per_coeff();
    std::vector<std::uint8_t> out(config.payload_bytes, 0);
    std::size_t bit_pos = 0;
    const std::size_t total_bits = out.size() * 8;
    for (const auto& chunk : chunks) {
        for (u64 v : chunk.coeffs()) {
            for (unsigned bi = 0; bi < b; ++bi, ++bit_pos) {
                if (bit_pos >= total_bits) return out;
                if ((v >> bi) & 1) out[bit_pos / 8] |= std::uint8_t(1) << (bit_pos % 8);
            }
        }
    }
    return out;
}

}  // namespace

PirDatabase PirDatabase::setup(std::vector<PirRow> rows, PirConfig config) {
    config.validate();
    if (rows.size() != config.row_count) {
        throw std::invalid_argument("row count does not match config");
    }
    PirDatabase db;
    db.config_ = config;
    db.rt_ = RingContext::create(config.he.degree, config.he.plain_modulus);

    std::set<std::vector<std::uint8_t>> seen_keys;
    std::set<std::vector<unsigned>> seen_codewords;
    db.codewords_.reserve(rows.size());
    db.chunks_.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.payload.size() > config.payload_bytes) {
            throw std::invalid_argument("payload exceeds the configured row size");
        }
        if (std::all_of(row.payload.begin(), row.payload.end(),
                        [](std::uint8_t x) { return x == 0; })) {
            throw std::invalid_argument(
                "all-zero payloads are reserved for the absent-keyword sentinel");
        }
        Codeword cw;
        if (config.mode == PirMode::index) {
            cw = map_index(i, config);
        } else {
            if (!seen_keys.insert(row.key).second) {
                throw std::invalid_argument("duplicate identifier");
            }
            cw = map_keyword(row.key, config);
        }
        if (!seen_codewords.insert(cw.positions()).second) {
            throw std::invalid_argument("identifier codeword collision");
        }
        db.codewords_.push_back(std::move(cw));
        db.chunks_.push_back(chunk_payload(row.payload, config, db.rt_));
    }
    return db;
}

void PirDatabase::prepare_for(const BfvBackend& be) const {
    const u64 fp = be.params()->fingerprint();
    if (prepared_fingerprint_ == fp && !prepared_.empty()) return;
    const std::size_t s = chunks_per_row();
    prepared_.assign(s, std::vector<BfvBackend::PreparedPlain>(chunks_.size()));
    parallel_for(chunks_.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < s; ++j) prepared_[j][i] = be.prepare_plain(chunks_[i][j]);
    });
    prepared_fingerprint_ = fp;
}

PackedQuery build_query_index(const HeBackend& be, u64 index, const PirConfig& config) {
    const auto bits = codeword_bits(map_index(index, config));
    return pack_query_bits(be, bits, config.compression);
}

PackedQuery build_query_keyword(const HeBackend& be, std::span<const std::uint8_t> key,
                                const PirConfig& config) {
    const auto bits = codeword_bits(map_keyword(key, config));
    return pack_query_bits(be, bits, config.compression);
}

std::vector<CipherValue> compute_selection_vector(const HeBackend& be,
                                                  std::span<const CipherValue> expanded,
                                                  const PirDatabase& db) {
    if (expanded.size() != db.config().code_length) {
        throw std::invalid_argument("expanded query length must equal the code length");
    }
    const auto* bfv = dynamic_cast<const BfvBackend*>(&be);
    if (bfv != nullptr && db.config().hamming_weight >= 2) {
        // Lift each expanded entry to the tensor basis once; every row
        // reuses the prepared forms for its leaf-level products.
        std::vector<BfvBackend::PreparedCipher> prepared(expanded.size());
        parallel_for(expanded.size(),
                     [&](std::size_t j) { prepared[j] = bfv->prepare_cipher(expanded[j]); });
        std::vector<CipherValue> sel(db.rows());
        parallel_for(db.rows(), [&](std::size_t i) {
            const auto pos = db.codeword(i).positions();
            std::vector<CipherValue> nodes;
            for (std::size_t p = 0; p + 1 < pos.size(); p += 2) {
                const bool root = pos.size() == 2;
                CipherValue prod = bfv->mul_lazy_prepared(prepared[pos[p]], prepared[pos[p + 1]]);
                if (!root) prod = bfv->finalize(prod);
                nodes.push_back(std::move(prod));
            }
            if (pos.size() % 2) nodes.push_back(expanded[pos.back()]);
            sel[i] = product_tree(be, std::move(nodes), /*lazy_root=*/true);
        });
        return sel;
    }
    BitSlicedBatch batch;
    batch.bits.assign(expanded.begin(), expanded.end());
    std::vector<CipherValue> sel(db.rows());
    parallel_for(db.rows(), [&](std::size_t i) {
        sel[i] = plain_cw_eq(be, batch, db.codeword(i), /*lazy_root=*/true);
    });
    return sel;
}

std::vector<CipherValue> inner_product(const HeBackend& be, std::span<const CipherValue> sel,
                                       const PirDatabase& db) {
    if (sel.size() != db.rows()) throw std::invalid_argument("selection vector length mismatch");
    const std::size_t s = db.chunks_per_row();
    std::vector<CipherValue> response(s);
    const auto* bfv = dynamic_cast<const BfvBackend*>(&be);
    if (bfv != nullptr) {
        db.prepare_for(*bfv);
        parallel_for(s, [&](std::size_t j) {
            response[j] = bfv->weighted_sum(sel, db.prepared_[j]);
        });
        return response;
    }
    parallel_for(s, [&](std::size_t j) {
        CipherValue acc = be.plain_mul(db.chunk(0, j), sel[0]);
        for (std::size_t i = 1; i < sel.size(); ++i) {
            acc = be.add(acc, be.plain_mul(db.chunk(i, j), sel[i]));
        }
        response[j] = std::move(acc);
    });
    return response;
}

std::vector<CipherValue> process_query(const HeBackend& be, const PackedQuery& query,
                                       const PirDatabase& db) {
    if (query.code_length != db.config().code_length) {
        throw std::invalid_argument("query code length does not match the database");
    }
    auto expanded = expand_query(be, query);
    auto sel = compute_selection_vector(be, expanded, db);
    auto response = inner_product(be, sel, db);
    for (auto& r : response) r = be.finalize(r);
    return response;
}

std::optional<std::vector<std::uint8_t>> extract(const HeBackend& be,
                                                 std::span<const CipherValue> response,
                                                 const PirConfig& config) {
    std::vector<RingElement> plains;
    plains.reserve(response.size());
    bool all_zero = true;
    for (const auto& ct : response) {
        plains.push_back(be.decrypt(ct));
        all_zero = all_zero && plains.back().is_zero();
    }
    if (all_zero) return std::nullopt;
    return unchunk_payload(plains, config);
}

}  // namespace cwpir
