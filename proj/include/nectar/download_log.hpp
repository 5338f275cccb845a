#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "nectar/clock.hpp"
#include "nectar/ip.hpp"

namespace nectar {

enum class Scheme { http, ftp, tftp, creceive };

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view s);
std::uint16_t default_port(Scheme s); // 0 = no default (creceive)

// One line of the download log:
//   [YYYY-MM-DDTHH:MM:SS] src_ip -> dst_ip url
// LF-terminated in files; format() returns the bare line.
struct DownloadLogEntry {
    UtcTime timestamp = 0;
    Ipv4 src_ip;
    Ipv4 dst_ip;
    std::string url;

    bool operator==(const DownloadLogEntry &) const = default;
};

// True iff url is scheme://remainder with a supported scheme, non-empty
// remainder, and only printable non-space bytes.
bool is_valid_log_url(std::string_view url);

// Throws std::invalid_argument if the entry violates its invariants.
std::string format_download_log(const DownloadLogEntry &entry);

// Accepts an optional single trailing LF. Returns nullopt on any deviation
// from the grammar.
std::optional<DownloadLogEntry> parse_download_log(std::string_view line);

} // namespace nectar
