#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nectar {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(std::span<const std::uint8_t> b) {
    return std::string(b.begin(), b.end());
}

std::string to_hex(std::span<const std::uint8_t> data);

// Strict: even length, [0-9a-fA-F] only. Throws std::invalid_argument.
Bytes from_hex(std::string_view hex);

// Deterministic filler used by tests and bundled scenarios: byte i = (i*131+7) & 0xff.
Bytes pattern_bytes(std::size_t n);

bool contains(std::span<const std::uint8_t> haystack, std::span<const std::uint8_t> needle);

// Offset of first occurrence, or npos.
std::size_t find_bytes(std::span<const std::uint8_t> haystack, std::span<const std::uint8_t> needle,
                       std::size_t from = 0);

} // namespace nectar
