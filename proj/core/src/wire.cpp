#include "cwpir/wire.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace cwpir {

namespace {
constexpr std::uint8_t kMagic[4] = {'C', 'W', 'P', '1'};
}

std::vector<std::uint8_t> encode_frame(const WireFrame& frame) {
    std::vector<std::uint8_t> out;
    out.reserve(10 + frame.payload.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kWireVersion);
    out.push_back(static_cast<std::uint8_t>(frame.type));
    const std::uint32_t len = static_cast<std::uint32_t>(frame.payload.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    return out;
}

WireFrame decode_frame(std::span<const std::uint8_t> data, std::size_t& consumed,
                       std::size_t frame_cap) {
    if (data.size() < 10) throw wire_error("truncated frame header");
    if (std::memcmp(data.data(), kMagic, 4) != 0) throw wire_error("bad frame magic");
    if (data[4] != kWireVersion) throw wire_error("unknown protocol version");
    const std::uint8_t type = data[5];
    if (type < 1 || type > 4) throw wire_error("unknown frame type");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= std::uint32_t(data[6 + i]) << (8 * i);
    if (len > frame_cap) throw wire_error("frame exceeds size cap");
    if (data.size() < 10 + std::size_t(len)) throw wire_error("truncated frame payload");
    WireFrame frame;
    frame.type = static_cast<FrameType>(type);
    frame.payload.assign(data.begin() + 10, data.begin() + 10 + len);
    consumed = 10 + len;
    return frame;
}

Socket::~Socket() { close(); }

Socket& Socket::operator=(Socket&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = o.fd_;
        o.fd_ = -1;
    }
    return *this;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Socket Socket::connect_tcp(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw wire_error("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw wire_error("bad address: " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw wire_error("connect failed: " + std::string(std::strerror(errno)));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return Socket(fd);
}

void Socket::send_all(std::span<const std::uint8_t> data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            throw wire_error("send failed");
        }
        sent += static_cast<std::size_t>(n);
    }
}

void Socket::recv_exact(std::span<std::uint8_t> out) {
    std::size_t got = 0;
    while (got < out.size()) {
        const ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
        if (n == 0) throw wire_error("connection closed");
        if (n < 0) {
            if (errno == EINTR) continue;
            throw wire_error("recv failed");
        }
        got += static_cast<std::size_t>(n);
    }
}

void Socket::send_frame(const WireFrame& frame) { send_all(encode_frame(frame)); }

WireFrame Socket::recv_frame(std::size_t frame_cap) {
    std::uint8_t header[10];
    recv_exact(header);
    if (std::memcmp(header, kMagic, 4) != 0) throw wire_error("bad frame magic");
    if (header[4] != kWireVersion) throw wire_error("unknown protocol version");
    const std::uint8_t type = header[5];
    if (type < 1 || type > 4) throw wire_error("unknown frame type");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= std::uint32_t(header[6 + i]) << (8 * i);
    if (len > frame_cap) throw wire_error("frame exceeds size cap");
    WireFrame frame;
    frame.type = static_cast<FrameType>(type);
    frame.payload.resize(len);
    if (len) recv_exact(frame.payload);
    return frame;
}

Listener::~Listener() { close(); }

void Listener::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Listener Listener::bind_local(std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw wire_error("socket() failed");
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw wire_error("bind failed: " + std::string(std::strerror(errno)));
    }
    if (::listen(fd, 16) != 0) {
        ::close(fd);
        throw wire_error("listen failed");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    Listener l;
    l.fd_ = fd;
    l.port_ = ntohs(addr.sin_port);
    return l;
}

Socket Listener::accept(int timeout_ms) {
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, timeout_ms);
    if (rc <= 0) return Socket();
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) return Socket();
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return Socket(fd);
}

}  // namespace cwpir
