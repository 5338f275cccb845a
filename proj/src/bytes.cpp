#include "nectar/bytes.hpp"

#include <algorithm>
#include <stdexcept>

namespace nectar {

static const char *kHexDigits = "0123456789abcdef";

std::string to_hex(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_val(hex[i]), lo = hex_val(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("non-hex character");
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

Bytes pattern_bytes(std::size_t n) {
    Bytes out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<std::uint8_t>((i * 131 + 7) & 0xff);
    return out;
}

std::size_t find_bytes(std::span<const std::uint8_t> haystack, std::span<const std::uint8_t> needle,
                       std::size_t from) {
    if (needle.empty()) return from <= haystack.size() ? from : std::string::npos;
    if (from >= haystack.size()) return std::string::npos;
    auto it = std::search(haystack.begin() + static_cast<std::ptrdiff_t>(from), haystack.end(),
                          needle.begin(), needle.end());
    if (it == haystack.end()) return std::string::npos;
    return static_cast<std::size_t>(it - haystack.begin());
}

bool contains(std::span<const std::uint8_t> haystack, std::span<const std::uint8_t> needle) {
    return find_bytes(haystack, needle) != std::string::npos;
}

} // namespace nectar
