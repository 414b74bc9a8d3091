#include "cwpir/client.hpp"

#include "cwpir/serialize.hpp"

namespace cwpir {

PirConfig parse_hello_config(std::span<const std::uint8_t> payload) {
    ByteReader r(payload);
    const auto mode = static_cast<PirMode>(r.u8());
    const u64 rows = r.u64le();
    const unsigned keyword_bits = r.u16();
    const bool lossy = r.u8() != 0;
    const Seed256 seed = r.seed();
    const unsigned k = r.u16();
    const unsigned m = r.u32();
    const unsigned c = r.u8();
    r.u32();  // s, derivable
    const std::uint32_t payload_bytes = r.u32();
    const std::string preset = r.str();
    if (!r.done()) throw serialize_error("trailing bytes in HELLO");

    HeParams params = bfv_preset(preset);
    PirConfig cfg;
    if (mode == PirMode::index) {
        cfg = make_index_config(rows, k, c, params, payload_bytes);
    } else if (lossy) {
        cfg = make_lossy_keyword_config(rows, m, k, c, params, payload_bytes, seed);
    } else {
        cfg = make_keyword_config(rows, keyword_bits, k, c, params, payload_bytes);
    }
    if (cfg.code_length != m) throw serialize_error("server code length disagrees with local derivation");
    return cfg;
}

QueryOutcome client_query(const std::string& host, std::uint16_t port, const QueryTarget& target,
                          const Seed256& client_seed) {
    Socket sock = Socket::connect_tcp(host, port);

    ByteWriter hello;
    hello.u8(1);
    sock.send_frame(WireFrame{FrameType::hello, hello.take()});
    WireFrame reply = sock.recv_frame();
    if (reply.type == FrameType::error) {
        ByteReader er(reply.payload);
        const auto code = er.u16();
        throw wire_error("server error " + std::to_string(code) + ": " + er.str());
    }
    if (reply.type != FrameType::hello) throw wire_error("expected HELLO reply");

    QueryOutcome out;
    out.config = parse_hello_config(reply.payload);
    const PirConfig& cfg = out.config;

    BfvBackend backend(cfg.he, client_seed, cfg.compression);
    PackedQuery pq;
    if (cfg.mode == PirMode::index) {
        if (!std::holds_alternative<u64>(target)) throw wire_error("server expects an index query");
        pq = build_query_index(backend, std::get<u64>(target), cfg);
    } else {
        if (!std::holds_alternative<std::vector<std::uint8_t>>(target)) {
            throw wire_error("server expects a keyword query");
        }
        pq = build_query_keyword(backend, std::get<std::vector<std::uint8_t>>(target), cfg);
    }

    ByteWriter q;
    const auto key_bytes = serialize_eval_keys(backend.eval_keys(), cfg.he);
    q.u32(static_cast<std::uint32_t>(key_bytes.size()));
    q.bytes(key_bytes);
    q.u16(static_cast<std::uint16_t>(pq.cts.size()));
    for (const auto& ct : pq.cts) {
        const auto bytes = serialize_ciphertext(ct);
        q.u32(static_cast<std::uint32_t>(bytes.size()));
        q.bytes(bytes);
        out.upload_bytes += bytes.size();
    }
    sock.send_frame(WireFrame{FrameType::query, q.take()});
    out.query_frames++;

    WireFrame resp = sock.recv_frame();
    if (resp.type == FrameType::error) {
        ByteReader er(resp.payload);
        const auto code = er.u16();
        throw wire_error("server error " + std::to_string(code) + ": " + er.str());
    }
    if (resp.type != FrameType::response) throw wire_error("expected RESPONSE");
    out.response_frames++;

    ByteReader r(resp.payload);
    const std::size_t count = r.u16();
    std::vector<CipherValue> response;
    for (std::size_t i = 0; i < count; ++i) {
        const auto bytes = r.bytes(r.u32());
        out.download_bytes += bytes.size();
        response.push_back(deserialize_ciphertext(bytes, backend));
    }
    out.payload = extract(backend, response, cfg);
    return out;
}

}  // namespace cwpir
