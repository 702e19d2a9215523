#pragma once

#include <cstdint>
#include <string>

#include "kem/wire_protocol.hpp"

namespace kem {

/// ByteStream over a connected socket (or any full-duplex fd pair).
/// Owns the descriptor(s); maps I/O failures to TransportError.
class FdStream final : public ByteStream {
public:
    explicit FdStream(int fd) : read_fd_(fd), write_fd_(fd) {}
    FdStream(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}
    ~FdStream() override;

    FdStream(FdStream&& other) noexcept;
    FdStream& operator=(FdStream&&) = delete;
    FdStream(const FdStream&) = delete;
    FdStream& operator=(const FdStream&) = delete;

    void read_exact(std::span<std::uint8_t> out) override;
    void write_all(std::span<const std::uint8_t> data) override;

private:
    int read_fd_ = -1;
    int write_fd_ = -1;
};

/// Connects to host:port (IPv4 dotted quad or name). Throws TransportError.
FdStream tcp_connect(const std::string& host, std::uint16_t port);

/// Listening socket bound at construction; accept() yields one connection.
class TcpListener {
public:
    TcpListener(const std::string& host, std::uint16_t port);
    ~TcpListener();

    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    FdStream accept();

    /// Actual bound port (useful when constructed with port 0).
    std::uint16_t port() const { return port_; }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

} // namespace kem
