#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace nectar {

// IPv4 address in host byte order.
struct Ipv4 {
    std::uint32_t value = 0;

    static constexpr Ipv4 loopback() { return Ipv4{0x7f000001}; }
    static constexpr Ipv4 any() { return Ipv4{0}; }

    bool operator==(const Ipv4 &) const = default;
    auto operator<=>(const Ipv4 &) const = default;
};

std::string format_ipv4(Ipv4 ip);

// Strict dotted-quad: four decimal octets 0..255, no leading zeros.
std::optional<Ipv4> parse_ipv4(std::string_view s);

struct SockAddr {
    Ipv4 ip;
    std::uint16_t port = 0;

    bool operator==(const SockAddr &) const = default;
};

std::string format_sockaddr(const SockAddr &a); // "a.b.c.d:port"
std::optional<SockAddr> parse_sockaddr(std::string_view s);

// "host:port" where host may be a name; resolved later by the dialer.
struct HostPort {
    std::string host;
    std::uint16_t port = 0;
};
std::optional<HostPort> parse_hostport(std::string_view s);

} // namespace nectar
