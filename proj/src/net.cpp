#include "nectar/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace nectar {

int Deadline::remaining_ms(int cap) const {
    if (at == std::chrono::steady_clock::time_point::max()) return cap;
    auto now = std::chrono::steady_clock::now();
    if (now >= at) return 0;
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(at - now).count();
    return ms > cap ? cap : static_cast<int>(ms);
}

Socket &Socket::operator=(Socket &&o) noexcept {
    if (this != &o) {
        close();
        fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

static sockaddr_in make_sockaddr(Ipv4 ip, std::uint16_t port) {
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port);
    sa.sin_addr.s_addr = htonl(ip.value);
    return sa;
}

static SockAddr from_sockaddr(const sockaddr_in &sa) {
    return SockAddr{Ipv4{ntohl(sa.sin_addr.s_addr)}, ntohs(sa.sin_port)};
}

std::optional<Ipv4> resolve_ipv4(const std::string &host) {
    if (auto ip = parse_ipv4(host)) return ip;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo *res = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) return std::nullopt;
    auto *sa = reinterpret_cast<sockaddr_in *>(res->ai_addr);
    Ipv4 ip{ntohl(sa->sin_addr.s_addr)};
    freeaddrinfo(res);
    return ip;
}

static bool poll_one(int fd, short events, Deadline deadline) {
    while (true) {
        pollfd p{fd, events, 0};
        int ms = deadline.remaining_ms();
        int rc = ::poll(&p, 1, ms);
        if (rc > 0) return true;
        if (rc == 0) return false; // timed out
        if (errno == EINTR) continue;
        return false;
    }
}

std::optional<TcpStream> TcpStream::connect(const std::string &host, std::uint16_t port,
                                            std::chrono::milliseconds connect_timeout, std::string *err) {
    auto fail = [&](const std::string &m) -> std::optional<TcpStream> {
        if (err) *err = m;
        return std::nullopt;
    };
    auto ip = resolve_ipv4(host);
    if (!ip) return fail("cannot resolve host: " + host);
    Socket sock(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!sock.valid()) return fail("socket: " + std::string(strerror(errno)));
    int flags = fcntl(sock.fd(), F_GETFL, 0);
    fcntl(sock.fd(), F_SETFL, flags | O_NONBLOCK);
    sockaddr_in sa = make_sockaddr(*ip, port);
    int rc = ::connect(sock.fd(), reinterpret_cast<sockaddr *>(&sa), sizeof(sa));
    if (rc != 0 && errno != EINPROGRESS) return fail("connect: " + std::string(strerror(errno)));
    if (rc != 0) {
        if (!poll_one(sock.fd(), POLLOUT, Deadline::in(connect_timeout))) return fail("connect timeout");
        int soerr = 0;
        socklen_t len = sizeof(soerr);
        getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &soerr, &len);
        if (soerr != 0) return fail("connect: " + std::string(strerror(soerr)));
    }
    fcntl(sock.fd(), F_SETFL, flags); // back to blocking; all I/O is poll-guarded
    return TcpStream(std::move(sock));
}

IoStatus TcpStream::read_some(std::uint8_t *buf, std::size_t cap, Deadline deadline, std::size_t &n) {
    n = 0;
    if (!sock_.valid()) return IoStatus::error;
    while (true) {
        if (!poll_one(sock_.fd(), POLLIN, deadline)) return IoStatus::timeout;
        ssize_t rc = ::recv(sock_.fd(), buf, cap, MSG_DONTWAIT);
        if (rc > 0) {
            n = static_cast<std::size_t>(rc);
            return IoStatus::ok;
        }
        if (rc == 0) return IoStatus::eof;
        if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
        return IoStatus::error;
    }
}

bool TcpStream::write_all(std::span<const std::uint8_t> data, Deadline deadline) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        if (!poll_one(sock_.fd(), POLLOUT, deadline)) return false;
        ssize_t rc = ::send(sock_.fd(), data.data() + sent, data.size() - sent,
                            MSG_NOSIGNAL | MSG_DONTWAIT);
        if (rc > 0) {
            sent += static_cast<std::size_t>(rc);
            continue;
        }
        if (rc < 0 && (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR)) continue;
        return false;
    }
    return true;
}

bool TcpStream::write_all(std::string_view s, Deadline deadline) {
    return write_all(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t *>(s.data()),
                                                   s.size()),
                     deadline);
}

void TcpStream::shutdown_send() {
    if (sock_.valid()) ::shutdown(sock_.fd(), SHUT_WR);
}

SockAddr TcpStream::local_addr() const {
    sockaddr_in sa{};
    socklen_t len = sizeof(sa);
    if (getsockname(sock_.fd(), reinterpret_cast<sockaddr *>(&sa), &len) != 0 || sa.sin_family != AF_INET)
        return {};
    return from_sockaddr(sa);
}

SockAddr TcpStream::peer_addr() const {
    sockaddr_in sa{};
    socklen_t len = sizeof(sa);
    if (getpeername(sock_.fd(), reinterpret_cast<sockaddr *>(&sa), &len) != 0 || sa.sin_family != AF_INET)
        return {};
    return from_sockaddr(sa);
}

TcpListener TcpListener::bind(Ipv4 ip, std::uint16_t port, int backlog) {
    Socket sock(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!sock.valid()) throw std::runtime_error("socket: " + std::string(strerror(errno)));
    int one = 1;
    setsockopt(sock.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa = make_sockaddr(ip, port);
    if (::bind(sock.fd(), reinterpret_cast<sockaddr *>(&sa), sizeof(sa)) != 0)
        throw std::runtime_error("bind " + format_ipv4(ip) + ":" + std::to_string(port) + ": " +
                                 strerror(errno));
    if (::listen(sock.fd(), backlog) != 0) throw std::runtime_error("listen: " + std::string(strerror(errno)));
    socklen_t len = sizeof(sa);
    getsockname(sock.fd(), reinterpret_cast<sockaddr *>(&sa), &len);
    TcpListener l;
    l.sock_ = std::move(sock);
    l.port_ = ntohs(sa.sin_port);
    return l;
}

std::optional<TcpStream> TcpListener::accept(Deadline deadline, std::stop_token stop) {
    while (sock_.valid()) {
        if (stop.stop_requested() || deadline.expired()) return std::nullopt;
        pollfd p{sock_.fd(), POLLIN, 0};
        int rc = ::poll(&p, 1, std::min(deadline.remaining_ms(), 100));
        if (rc < 0 && errno != EINTR) return std::nullopt;
        if (rc <= 0) continue;
        int fd = ::accept4(sock_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) {
            if (errno == EINTR || errno == ECONNABORTED || errno == EAGAIN) continue;
            return std::nullopt;
        }
        return TcpStream(Socket(fd));
    }
    return std::nullopt;
}

UdpSocket UdpSocket::bind(Ipv4 ip, std::uint16_t port) {
    Socket sock(::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0));
    if (!sock.valid()) throw std::runtime_error("socket: " + std::string(strerror(errno)));
    sockaddr_in sa = make_sockaddr(ip, port);
    if (::bind(sock.fd(), reinterpret_cast<sockaddr *>(&sa), sizeof(sa)) != 0)
        throw std::runtime_error("bind udp " + format_ipv4(ip) + ":" + std::to_string(port) + ": " +
                                 strerror(errno));
    socklen_t len = sizeof(sa);
    getsockname(sock.fd(), reinterpret_cast<sockaddr *>(&sa), &len);
    UdpSocket u;
    u.sock_ = std::move(sock);
    u.port_ = ntohs(sa.sin_port);
    return u;
}

bool UdpSocket::send_to(std::span<const std::uint8_t> data, const SockAddr &to) {
    sockaddr_in sa = make_sockaddr(to.ip, to.port);
    ssize_t rc = ::sendto(sock_.fd(), data.data(), data.size(), MSG_NOSIGNAL,
                          reinterpret_cast<sockaddr *>(&sa), sizeof(sa));
    return rc == static_cast<ssize_t>(data.size());
}

IoStatus UdpSocket::recv_from(Bytes &out, SockAddr &from, Deadline deadline, std::size_t cap) {
    out.resize(cap);
    while (true) {
        if (!poll_one(sock_.fd(), POLLIN, deadline)) return IoStatus::timeout;
        sockaddr_in sa{};
        socklen_t len = sizeof(sa);
        ssize_t rc = ::recvfrom(sock_.fd(), out.data(), out.size(), MSG_DONTWAIT,
                                reinterpret_cast<sockaddr *>(&sa), &len);
        if (rc >= 0) {
            out.resize(static_cast<std::size_t>(rc));
            from = from_sockaddr(sa);
            return IoStatus::ok;
        }
        if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
        return IoStatus::error;
    }
}

std::pair<TcpStream, TcpStream> stream_pair() {
    int fds[2];
    if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
        throw std::runtime_error("socketpair: " + std::string(strerror(errno)));
    return {TcpStream(Socket(fds[0])), TcpStream(Socket(fds[1]))};
}

} // namespace nectar
