#include "nectar/intent.hpp"

#include <cstdio>

namespace nectar {

std::string format_discovered_via(const DiscoveredVia &v) {
    switch (v.kind) {
    case DiscoveredVia::Kind::plaintext: return "plaintext";
    case DiscoveredVia::Kind::xor_key: {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "xor:0x%02x", v.key);
        return buf;
    }
    case DiscoveredVia::Kind::connectback: return "connectback";
    }
    return "?";
}

std::optional<DiscoveredVia> parse_discovered_via(std::string_view s) {
    if (s == "plaintext") return DiscoveredVia::plaintext();
    if (s == "connectback") return DiscoveredVia::connectback();
    if (s.size() == 8 && s.substr(0, 6) == "xor:0x") {
        unsigned int key = 0;
        if (std::sscanf(std::string(s.substr(6)).c_str(), "%2x", &key) == 1 && key >= 1 && key <= 255)
            return DiscoveredVia::xored(static_cast<std::uint8_t>(key));
    }
    return std::nullopt;
}

std::string DownloadIntent::url_text() const {
    std::string out(scheme_name(scheme));
    out += "://";
    if (credentials) out += credentials->user + ":" + credentials->password + "@";
    out += host;
    if (scheme == Scheme::creceive || port != default_port(scheme)) out += ":" + std::to_string(port);
    if (!path.empty()) out += "/" + path;
    return out;
}

} // namespace nectar
