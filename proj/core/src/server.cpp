#include "cwpir/server.hpp"

#include <thread>
#include <vector>

#include "cwpir/serialize.hpp"

namespace cwpir {

namespace {

PirConfig config_from_db(const DbFileData& db, const PirServerOptions& opts) {
    const auto& h = db.header;
    const std::string preset = opts.preset_override.empty() ? h.preset : opts.preset_override;
    HeParams params = bfv_preset(preset);
    if (h.mode == PirMode::index) {
        return make_index_config(h.row_count, opts.hamming_weight, opts.compression, params,
                                 h.payload_bytes);
    }
    if (h.lossy) {
        // Lossy domains need an explicit weight; fall back to 2.
        const unsigned k = opts.hamming_weight ? opts.hamming_weight : 2;
        const unsigned m = min_code_length(std::max<u64>(h.row_count * 1024, 4096), k);
        return make_lossy_keyword_config(h.row_count, m, k, opts.compression, params,
                                         h.payload_bytes, h.lossy_seed);
    }
    return make_keyword_config(h.row_count, h.keyword_bits, opts.hamming_weight,
                               opts.compression, params, h.payload_bytes);
}

WireFrame error_frame(std::uint16_t code, std::string_view message) {
    ByteWriter w;
    w.u16(code);
    w.str(message);
    return WireFrame{FrameType::error, w.take()};
}

}  // namespace

PirServer::PirServer(DbFileData db, const PirServerOptions& opts)
    : db_(PirDatabase::setup(std::move(db.rows), config_from_db(db, opts))),
      frame_cap_(opts.frame_cap) {}

std::vector<std::uint8_t> PirServer::hello_payload() const {
    const PirConfig& cfg = config();
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(cfg.mode));
    w.u64le(cfg.row_count);
    w.u16(static_cast<std::uint16_t>(cfg.keyword_bits));
    w.u8(cfg.lossy ? 1 : 0);
    w.seed(cfg.lossy_seed);
    w.u16(static_cast<std::uint16_t>(cfg.hamming_weight));
    w.u32(cfg.code_length);
    w.u8(static_cast<std::uint8_t>(cfg.compression));
    w.u32(static_cast<std::uint32_t>(cfg.plaintexts_per_row()));
    w.u32(static_cast<std::uint32_t>(cfg.payload_bytes));
    w.str(cfg.he.name);
    return w.take();
}

void PirServer::handle_query(Socket& sock, std::span<const std::uint8_t> payload) const {
    ByteReader r(payload);
    const auto key_bytes = r.bytes(r.u32());
    const std::size_t ct_count = r.u16();
    if (ct_count != config().upload_ciphertexts()) {
        throw serialize_error("unexpected query ciphertext count");
    }
    BfvBackend backend(config().he, deserialize_eval_keys(key_bytes, config().he));
    PackedQuery pq;
    pq.compression = config().compression;
    pq.code_length = config().code_length;
    for (std::size_t i = 0; i < ct_count; ++i) {
        const auto ct_bytes = r.bytes(r.u32());
        pq.cts.push_back(deserialize_ciphertext(ct_bytes, backend));
    }
    if (!r.done()) throw serialize_error("trailing bytes in query");

    auto response = process_query(backend, pq, db_);
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(response.size()));
    for (const auto& ct : response) {
        const auto bytes = serialize_ciphertext(ct);
        w.u32(static_cast<std::uint32_t>(bytes.size()));
        w.bytes(bytes);
    }
    sock.send_frame(WireFrame{FrameType::response, w.take()});
}

void PirServer::handle_connection(Socket sock) const {
    bool greeted = false;
    for (;;) {
        WireFrame frame;
        try {
            frame = sock.recv_frame(frame_cap_);
        } catch (const wire_error& e) {
            if (std::string_view(e.what()) == "connection closed") return;
            // Framing damage or an oversized length: report and stop
            // reading this stream (its framing can no longer be trusted).
            try {
                sock.send_frame(error_frame(400, e.what()));
            } catch (...) {
            }
            return;
        }
        try {
            switch (frame.type) {
                case FrameType::hello:
                    greeted = true;
                    sock.send_frame(WireFrame{FrameType::hello, hello_payload()});
                    break;
                case FrameType::query:
                    if (!greeted) throw serialize_error("QUERY before HELLO");
                    handle_query(sock, frame.payload);
                    break;
                default:
                    throw serialize_error("unexpected frame type");
            }
        } catch (const std::exception& e) {
            // Malformed content inside a well-framed message: answer
            // with ERROR and keep the connection.
            try {
                sock.send_frame(error_frame(422, e.what()));
            } catch (...) {
                return;
            }
        }
    }
}

void PirServer::serve(Listener& listener, std::atomic<bool>& stop) {
    std::vector<std::thread> sessions;
    while (!stop.load()) {
        Socket sock = listener.accept(100);
        if (!sock.valid()) continue;
        sessions.emplace_back(
            [this](Socket s) { handle_connection(std::move(s)); }, std::move(sock));
    }
    for (auto& th : sessions) th.join();
}

}  // namespace cwpir
