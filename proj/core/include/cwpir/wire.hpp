#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cwpir {

struct wire_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FrameType : std::uint8_t { hello = 1, query = 2, response = 3, error = 4 };

constexpr std::uint8_t kWireVersion = 1;
constexpr std::size_t kDefaultFrameCap = 256ull << 20;  // 256 MiB

/// Length-prefixed frame: magic "CWP1", version u8, type u8, payload
/// length u32 little-endian, payload bytes.
struct WireFrame {
    FrameType type = FrameType::error;
    std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_frame(const WireFrame& frame);

/// Parses one frame from `data`; `consumed` receives the byte count.
WireFrame decode_frame(std::span<const std::uint8_t> data, std::size_t& consumed,
                       std::size_t frame_cap = kDefaultFrameCap);

/// Minimal RAII TCP socket (blocking).
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket();
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    static Socket connect_tcp(const std::string& host, std::uint16_t port);

    bool valid() const { return fd_ >= 0; }
    void send_all(std::span<const std::uint8_t> data);
    void recv_exact(std::span<std::uint8_t> out);
    void close();

    void send_frame(const WireFrame& frame);
    WireFrame recv_frame(std::size_t frame_cap = kDefaultFrameCap);

private:
    int fd_ = -1;
};

class Listener {
public:
    Listener() = default;
    ~Listener();
    Listener(Listener&& o) noexcept : fd_(o.fd_), port_(o.port_) { o.fd_ = -1; }
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    /// Binds to 127.0.0.1; port 0 picks an ephemeral port.
    static Listener bind_local(std::uint16_t port);

    std::uint16_t port() const { return port_; }
    /// Waits up to timeout_ms; returns an invalid socket on timeout.
    Socket accept(int timeout_ms);
    void close();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

}  // namespace cwpir
