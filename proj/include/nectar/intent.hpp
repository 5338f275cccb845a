#pragma once

#include <optional>
#include <string>

#include "nectar/download_log.hpp"

namespace nectar {

struct Credentials {
    std::string user;
    std::string password;

    bool operator==(const Credentials &) const = default;
};

// How an intent was recovered from the payload.
struct DiscoveredVia {
    enum class Kind { plaintext, xor_key, connectback };
    Kind kind = Kind::plaintext;
    std::uint8_t key = 0; // xor_key only, never 0

    static DiscoveredVia plaintext() { return {}; }
    static DiscoveredVia xored(std::uint8_t k) { return {Kind::xor_key, k}; }
    static DiscoveredVia connectback() { return {Kind::connectback, 0}; }

    bool operator==(const DiscoveredVia &) const = default;
};

std::string format_discovered_via(const DiscoveredVia &v);
std::optional<DiscoveredVia> parse_discovered_via(std::string_view s);

// One recovered instruction to fetch a binary.
struct DownloadIntent {
    Scheme scheme = Scheme::http;
    std::string host;
    std::uint16_t port = 0; // defaulted per scheme at parse time; creceive always explicit
    std::string path;       // no leading '/'; may be empty
    std::optional<Credentials> credentials; // ftp only
    DiscoveredVia discovered_via;
    std::string source_record;

    bool operator==(const DownloadIntent &) const = default;

    // Dedup key: everything but discovered_via and source_record.
    bool same_target(const DownloadIntent &o) const {
        return scheme == o.scheme && host == o.host && port == o.port && path == o.path &&
               credentials == o.credentials;
    }

    // Canonical URL text. Default ports are omitted; creceive always shows its port.
    std::string url_text() const;
};

} // namespace nectar
