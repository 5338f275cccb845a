#pragma once

#include <chrono>
#include <optional>
#include <stop_token>
#include <string>
#include <utility>

#include "nectar/bytes.hpp"
#include "nectar/ip.hpp"

namespace nectar {

// Absolute deadline for blocking I/O, steady-clock based.
struct Deadline {
    std::chrono::steady_clock::time_point at;

    static Deadline in(std::chrono::milliseconds d) { return {std::chrono::steady_clock::now() + d}; }
    static Deadline in_ms(long ms) { return in(std::chrono::milliseconds(ms)); }
    static Deadline never() { return {std::chrono::steady_clock::time_point::max()}; }

    bool expired() const { return std::chrono::steady_clock::now() >= at; }
    // Remaining time clamped to [0, cap] for poll(2).
    int remaining_ms(int cap = 3600 * 1000) const;
};

class Socket {
  public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket() { close(); }
    Socket(Socket &&o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket &operator=(Socket &&o) noexcept;
    Socket(const Socket &) = delete;
    Socket &operator=(const Socket &) = delete;

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void close();
    int release() { return std::exchange(fd_, -1); }

  private:
    int fd_ = -1;
};

enum class IoStatus { ok, eof, timeout, error };

class TcpStream {
  public:
    TcpStream() = default;
    explicit TcpStream(Socket sock) : sock_(std::move(sock)) {}

    // Resolves host (dotted-quad or name, IPv4 only) and connects within
    // connect_timeout. On failure returns an empty optional and sets err.
    static std::optional<TcpStream> connect(const std::string &host, std::uint16_t port,
                                            std::chrono::milliseconds connect_timeout,
                                            std::string *err = nullptr);

    bool valid() const { return sock_.valid(); }
    IoStatus read_some(std::uint8_t *buf, std::size_t cap, Deadline deadline, std::size_t &n);
    bool write_all(std::span<const std::uint8_t> data, Deadline deadline);
    bool write_all(std::string_view s, Deadline deadline);
    void shutdown_send();
    void close() { sock_.close(); }

    SockAddr local_addr() const;
    SockAddr peer_addr() const;

  private:
    Socket sock_;
};

class TcpListener {
  public:
    TcpListener() = default;

    // Throws std::runtime_error when the address cannot be bound.
    static TcpListener bind(Ipv4 ip, std::uint16_t port, int backlog = 64);

    bool valid() const { return sock_.valid(); }
    std::uint16_t port() const { return port_; }

    // Waits for a connection until the deadline or stop request.
    std::optional<TcpStream> accept(Deadline deadline, std::stop_token stop = {});
    void close() { sock_.close(); }

  private:
    Socket sock_;
    std::uint16_t port_ = 0;
};

class UdpSocket {
  public:
    UdpSocket() = default;

    static UdpSocket bind(Ipv4 ip, std::uint16_t port); // throws on failure

    bool valid() const { return sock_.valid(); }
    std::uint16_t port() const { return port_; }
    bool send_to(std::span<const std::uint8_t> data, const SockAddr &to);
    IoStatus recv_from(Bytes &out, SockAddr &from, Deadline deadline, std::size_t cap = 65536);

  private:
    Socket sock_;
    std::uint16_t port_ = 0;
};

std::optional<Ipv4> resolve_ipv4(const std::string &host);

// Connected AF_UNIX stream pair for in-process tests.
std::pair<TcpStream, TcpStream> stream_pair();

} // namespace nectar
