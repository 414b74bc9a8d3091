#include "cwpir/serialize.hpp"

namespace cwpir {

namespace {

constexpr std::uint16_t kCtMagic = 0xC71E;

unsigned byte_width(u64 modulus) {
    unsigned bits = 0;
    while (modulus) {
        modulus >>= 1;
        ++bits;
    }
    return (bits + 7) / 8;
}

void write_coeffs(ByteWriter& w, const std::vector<u64>& coeffs, unsigned width) {
    for (u64 c : coeffs) {
        for (unsigned b = 0; b < width; ++b) w.u8(static_cast<std::uint8_t>(c >> (8 * b)));
    }
}

std::vector<u64> read_coeffs(ByteReader& r, std::size_t n, unsigned width, u64 modulus) {
    std::vector<u64> coeffs(n);
    for (auto& c : coeffs) {
        u64 v = 0;
        for (unsigned b = 0; b < width; ++b) v |= u64(r.u8()) << (8 * b);
        if (v >= modulus) throw serialize_error("coefficient exceeds modulus");
        c = v;
    }
    return coeffs;
}

}  // namespace

void ByteWriter::u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
}

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64le(u64 v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::bytes(std::span<const std::uint8_t> data) {
    buf_.insert(buf_.end(), data.begin(), data.end());
}

void ByteWriter::str(std::string_view s) {
    u16(static_cast<std::uint16_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::seed(const Seed256& s) {
    for (u64 w : s.words) u64le(w);
}

std::uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
    need(2);
    std::uint16_t v = data_[pos_] | (std::uint16_t(data_[pos_ + 1]) << 8);
    pos_ += 2;
    return v;
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}

u64 ByteReader::u64le() {
    need(8);
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= u64(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

std::vector<std::uint8_t> ByteReader::bytes(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
}

std::string ByteReader::str() {
    const std::size_t n = u16();
    need(n);
    std::string out(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return out;
}

Seed256 ByteReader::seed() {
    Seed256 s;
    for (auto& w : s.words) w = u64le();
    return s;
}

std::vector<std::uint8_t> serialize_ciphertext(const CipherValue& v) {
    ByteWriter w;
    w.u16(kCtMagic);
    w.u64le(v.params->fingerprint());
    w.u8(static_cast<std::uint8_t>(v.kind));
    if (v.kind == BackendKind::transparent) {
        write_coeffs(w, v.plain.coeffs(), byte_width(v.params->plain_modulus));
        return w.take();
    }
    const bool seeded = v.c1_seed.has_value() && v.comps.size() == 2;
    w.u8(static_cast<std::uint8_t>(v.comps.size()));
    w.u8(seeded ? 1 : 0);
    if (seeded) w.seed(*v.c1_seed);
    for (std::size_t k = 0; k < v.comps.size(); ++k) {
        if (seeded && k == 1) continue;
        for (std::size_t i = 0; i < v.comps[k].size(); ++i) {
            write_coeffs(w, v.comps[k][i].coeffs(), byte_width(v.params->coeff_primes[i]));
        }
    }
    return w.take();
}

CipherValue deserialize_ciphertext(std::span<const std::uint8_t> data, const HeBackend& be) {
    ByteReader r(data);
    if (r.u16() != kCtMagic) throw serialize_error("bad ciphertext magic");
    if (r.u64le() != be.params()->fingerprint()) {
        throw serialize_error("ciphertext was produced under different parameters");
    }
    const auto kind = static_cast<BackendKind>(r.u8());
    if (kind != be.kind()) throw serialize_error("backend kind mismatch");
    CipherValue v;
    v.kind = kind;
    v.params = be.params();
    const std::size_t n = be.params()->degree;
    if (kind == BackendKind::transparent) {
        v.plain = RingElement::from_coeffs(
            be.plain_context(),
            read_coeffs(r, n, byte_width(be.params()->plain_modulus),
                        be.params()->plain_modulus));
        if (!r.done()) throw serialize_error("trailing bytes");
        return v;
    }
    const auto* bfv = dynamic_cast<const BfvBackend*>(&be);
    if (bfv == nullptr) throw serialize_error("BFV ciphertext needs a BFV backend");
    const std::size_t comps = r.u8();
    if (comps < 2 || comps > 3) throw serialize_error("unsupported component count");
    const bool seeded = r.u8() != 0;
    std::optional<Seed256> seed;
    if (seeded) seed = r.seed();
    for (std::size_t k = 0; k < comps; ++k) {
        if (seeded && k == 1) {
            v.comps.push_back(bfv->expand_seeded_component(*seed));
            continue;
        }
        RnsPoly poly;
        for (std::size_t i = 0; i < bfv->chain_length(); ++i) {
            const u64 qi = be.params()->coeff_primes[i];
            poly.push_back(RingElement::from_coeffs(bfv->chain_context(i),
                                                    read_coeffs(r, n, byte_width(qi), qi)));
        }
        v.comps.push_back(std::move(poly));
    }
    if (seeded) v.c1_seed = seed;
    if (!r.done()) throw serialize_error("trailing bytes");
    return v;
}

std::size_t ciphertext_wire_bytes(const HeParams& params, std::size_t components) {
    std::size_t per_comp = 0;
    for (u64 p : params.coeff_primes) per_comp += params.degree * byte_width(p);
    return 13 + components * per_comp;
}

std::vector<std::uint8_t> serialize_eval_keys(const EvalKeySet& keys, const HeParams& params) {
    ByteWriter w;
    w.u64le(params.fingerprint());
    auto write_ks = [&](const KeySwitchKey& k) {
        w.u32(k.digit_bits);
        w.u32(static_cast<std::uint32_t>(k.rows.size()));
        for (const auto& row : k.rows) {
            for (const auto& comp : row) {
                for (std::size_t i = 0; i < comp.size(); ++i) {
                    write_coeffs(w, comp[i].coeffs(), byte_width(params.coeff_primes[i]));
                }
            }
        }
    };
    write_ks(keys.relin);
    w.u32(static_cast<std::uint32_t>(keys.galois.size()));
    for (const auto& [g, key] : keys.galois) {
        w.u64le(g);
        write_ks(key);
    }
    return w.take();
}

EvalKeySet deserialize_eval_keys(std::span<const std::uint8_t> data, const HeParams& params) {
    ByteReader r(data);
    if (r.u64le() != params.fingerprint()) {
        throw serialize_error("evaluation keys were produced under different parameters");
    }
    const std::size_t n = params.degree;
    std::vector<RingContextPtr> chain;
    for (u64 p : params.coeff_primes) chain.push_back(RingContext::create(n, p));
    auto read_ks = [&]() {
        KeySwitchKey k;
        k.digit_bits = r.u32();
        const std::size_t rows = r.u32();
        if (rows > 4096) throw serialize_error("implausible key row count");
        for (std::size_t d = 0; d < rows; ++d) {
            std::array<RnsPoly, 2> row;
            for (auto& comp : row) {
                for (std::size_t i = 0; i < chain.size(); ++i) {
                    const u64 qi = params.coeff_primes[i];
                    comp.push_back(RingElement::from_coeffs(
                        chain[i], read_coeffs(r, n, byte_width(qi), qi)));
                }
            }
            k.rows.push_back(std::move(row));
        }
        return k;
    };
    EvalKeySet keys;
    keys.relin = read_ks();
    const std::size_t ng = r.u32();
    if (ng > 64) throw serialize_error("implausible Galois key count");
    for (std::size_t i = 0; i < ng; ++i) {
        const u64 g = r.u64le();
        keys.galois[g] = read_ks();
    }
    if (!r.done()) throw serialize_error("trailing bytes");
    return keys;
}

}  // namespace cwpir
