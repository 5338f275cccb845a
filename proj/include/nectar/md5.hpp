#pragma once

#include <span>
#include <string>

#include "nectar/bytes.hpp"

namespace nectar {

// Lowercase 32-char hex MD5 digest. MD5 is retained deliberately: the whole
// data model (dedup store, scan tables, vendor sharing) is keyed on it.
std::string md5_hex(std::span<const std::uint8_t> data);

inline std::string md5_hex(std::string_view s) {
    return md5_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t *>(s.data()), s.size()));
}

bool is_md5_hex(std::string_view s);

} // namespace nectar
