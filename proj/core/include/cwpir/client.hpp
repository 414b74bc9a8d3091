#pragma once

#include <optional>
#include <string>
#include <variant>

#include "cwpir/pir.hpp"
#include "cwpir/wire.hpp"

namespace cwpir {

/// Either a physical row index or a keyword identifier.
using QueryTarget = std::variant<u64, std::vector<std::uint8_t>>;

struct QueryOutcome {
    std::optional<std::vector<std::uint8_t>> payload;  // nullopt: not found
    PirConfig config;      // as negotiated over HELLO
    u64 query_frames = 0;  // retrieval frames on the wire
    u64 response_frames = 0;
    u64 upload_bytes = 0;
    u64 download_bytes = 0;
};

/// One full retrieval: HELLO handshake, key generation, a single
/// QUERY/RESPONSE exchange, local extraction.
QueryOutcome client_query(const std::string& host, std::uint16_t port, const QueryTarget& target,
                          const Seed256& client_seed);

/// HELLO payload decoding (shared with the CLI).
PirConfig parse_hello_config(std::span<const std::uint8_t> payload);

}  // namespace cwpir
