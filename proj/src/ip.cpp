#include "nectar/ip.hpp"

#include <cstdio>

namespace nectar {

std::string format_ipv4(Ipv4 ip) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", ip.value >> 24, (ip.value >> 16) & 0xff,
                  (ip.value >> 8) & 0xff, ip.value & 0xff);
    return buf;
}

// Parses one octet from s[pos...]; returns false on bad syntax.
static bool parse_octet(std::string_view s, std::size_t &pos, std::uint32_t &out) {
    std::size_t start = pos;
    std::uint32_t v = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        v = v * 10 + static_cast<std::uint32_t>(s[pos] - '0');
        ++pos;
        if (pos - start > 3) return false;
    }
    if (pos == start) return false;
    if (pos - start > 1 && s[start] == '0') return false; // no leading zeros
    if (v > 255) return false;
    out = v;
    return true;
}

std::optional<Ipv4> parse_ipv4(std::string_view s) {
    std::size_t pos = 0;
    std::uint32_t acc = 0;
    for (int i = 0; i < 4; ++i) {
        std::uint32_t oct;
        if (!parse_octet(s, pos, oct)) return std::nullopt;
        acc = acc << 8 | oct;
        if (i < 3) {
            if (pos >= s.size() || s[pos] != '.') return std::nullopt;
            ++pos;
        }
    }
    if (pos != s.size()) return std::nullopt;
    return Ipv4{acc};
}

std::string format_sockaddr(const SockAddr &a) {
    return format_ipv4(a.ip) + ":" + std::to_string(a.port);
}

static std::optional<std::uint16_t> parse_port(std::string_view s) {
    if (s.empty() || s.size() > 5) return std::nullopt;
    std::uint32_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + static_cast<std::uint32_t>(c - '0');
    }
    if (v > 65535) return std::nullopt;
    return static_cast<std::uint16_t>(v);
}

std::optional<SockAddr> parse_sockaddr(std::string_view s) {
    auto colon = s.rfind(':');
    if (colon == std::string_view::npos) return std::nullopt;
    auto ip = parse_ipv4(s.substr(0, colon));
    auto port = parse_port(s.substr(colon + 1));
    if (!ip || !port) return std::nullopt;
    return SockAddr{*ip, *port};
}

std::optional<HostPort> parse_hostport(std::string_view s) {
    auto colon = s.rfind(':');
    if (colon == std::string_view::npos || colon == 0) return std::nullopt;
    auto port = parse_port(s.substr(colon + 1));
    if (!port) return std::nullopt;
    return HostPort{std::string(s.substr(0, colon)), *port};
}

} // namespace nectar
