#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwpir/bfv.hpp"
#include "cwpir/he.hpp"

namespace cwpir {

struct serialize_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64le(u64 v);
    void bytes(std::span<const std::uint8_t> data);
    void str(std::string_view s);
    void seed(const Seed256& s);

    std::size_t size() const { return buf_.size(); }
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    const std::vector<std::uint8_t>& view() const { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    u64 u64le();
    std::vector<std::uint8_t> bytes(std::size_t n);
    std::string str();
    Seed256 seed();

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw serialize_error("truncated input");
    }
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

/// Deterministic ciphertext layout: header (magic, params fingerprint,
/// backend kind, component count, seeded flag), then coefficients
/// little-endian at fixed width ceil(bits(q_i)/8) per chain prime.
/// Fresh secret-key ciphertexts store the second component as its
/// 32-byte seed.
std::vector<std::uint8_t> serialize_ciphertext(const CipherValue& v);
CipherValue deserialize_ciphertext(std::span<const std::uint8_t> data, const HeBackend& be);

std::vector<std::uint8_t> serialize_eval_keys(const EvalKeySet& keys, const HeParams& params);
EvalKeySet deserialize_eval_keys(std::span<const std::uint8_t> data, const HeParams& params);

/// Serialized size of a non-seeded ciphertext under the given params.
std::size_t ciphertext_wire_bytes(const HeParams& params, std::size_t components);

}  // namespace cwpir
