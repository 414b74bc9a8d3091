#pragma once

#include <atomic>
#include <limits>

#include "cwpir/db_file.hpp"
#include "cwpir/pir.hpp"
#include "cwpir/wire.hpp"

namespace cwpir {

struct PirServerOptions {
    unsigned hamming_weight = 0;  // 0 -> module default
    unsigned compression = std::numeric_limits<unsigned>::max();
    std::string preset_override;  // empty -> database header preset
    std::size_t frame_cap = kDefaultFrameCap;
};

/// Hosts the offline Setup and the online Process stage behind the
/// framed wire protocol. One HELLO exchange negotiates the code
/// parameters; each retrieval is a single QUERY/RESPONSE pair.
class PirServer {
public:
    PirServer(DbFileData db, const PirServerOptions& opts);

    const PirConfig& config() const { return db_.config(); }
    const PirDatabase& database() const { return db_; }

    /// Accept loop; returns once `stop` is set.
    void serve(Listener& listener, std::atomic<bool>& stop);

    /// Runs one client session to completion.
    void handle_connection(Socket sock) const;

    /// HELLO reply payload (exposed for tests).
    std::vector<std::uint8_t> hello_payload() const;

private:
    void handle_query(Socket& sock, std::span<const std::uint8_t> payload) const;
    PirDatabase db_;
    std::size_t frame_cap_;
};

}  // namespace cwpir
