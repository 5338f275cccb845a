#include "nectar/url_extract.hpp"

#include <array>
#include <cctype>

namespace nectar {

namespace {

bool is_alnum(std::uint8_t b) { return std::isalnum(b) != 0; }
bool is_host_char(std::uint8_t b) { return is_alnum(b) || b == '.' || b == '-'; }
bool is_digit(std::uint8_t b) { return b >= '0' && b <= '9'; }
bool is_printable(std::uint8_t b) { return b >= 0x21 && b <= 0x7e; }
// Path bytes are printable ASCII minus quote characters; anything else
// (whitespace, NUL, raw shellcode bytes) terminates the URL.
bool is_path_char(std::uint8_t b) { return is_printable(b) && b != '"' && b != '\'' && b != '`'; }

struct SchemeToken {
    Scheme scheme;
    std::string_view marker; // "scheme://"
};

constexpr std::array<SchemeToken, 4> kSchemes = {{
    {Scheme::http, "http://"},
    {Scheme::ftp, "ftp://"},
    {Scheme::tftp, "tftp://"},
    {Scheme::creceive, "creceive://"},
}};

bool marker_at(std::span<const std::uint8_t> p, std::size_t pos, std::string_view marker) {
    if (pos + marker.size() > p.size()) return false;
    for (std::size_t i = 0; i < marker.size(); ++i)
        if (p[pos + i] != static_cast<std::uint8_t>(marker[i])) return false;
    return true;
}

// Greedy parse of one URL starting right after "scheme://". Returns nullopt
// when no valid URL exists at this position at all.
std::optional<DownloadIntent> parse_candidate(std::span<const std::uint8_t> p, std::size_t start,
                                              Scheme scheme) {
    std::size_t i = start;
    std::optional<Credentials> creds;

    if (scheme == Scheme::ftp) {
        // user:pass@ may precede the host; only ftp carries credentials.
        std::size_t j = i;
        while (j < p.size() && is_printable(p[j]) && p[j] != '@' && p[j] != '/') ++j;
        if (j < p.size() && p[j] == '@' && j > i) {
            std::string userinfo(p.begin() + static_cast<std::ptrdiff_t>(i),
                                 p.begin() + static_cast<std::ptrdiff_t>(j));
            auto colon = userinfo.find(':');
            Credentials c;
            if (colon == std::string::npos) {
                c.user = userinfo;
            } else {
                c.user = userinfo.substr(0, colon);
                c.password = userinfo.substr(colon + 1);
            }
            if (c.user.empty()) return std::nullopt;
            creds = std::move(c);
            i = j + 1;
        }
    }

    std::size_t host_start = i;
    while (i < p.size() && is_host_char(p[i]) && i - host_start < 253) ++i;
    if (i == host_start) return std::nullopt;
    std::string host(p.begin() + static_cast<std::ptrdiff_t>(host_start),
                     p.begin() + static_cast<std::ptrdiff_t>(i));

    std::uint16_t port = default_port(scheme);
    if (i < p.size() && p[i] == ':') {
        std::size_t d = i + 1;
        std::uint32_t v = 0;
        while (d < p.size() && is_digit(p[d]) && d - i <= 5) {
            v = v * 10 + (p[d] - '0');
            ++d;
        }
        if (d > i + 1 && v >= 1 && v <= 65535) {
            port = static_cast<std::uint16_t>(v);
            i = d;
        }
        // otherwise the URL ends before the ':' (host-only form)
    }
    if (scheme == Scheme::creceive && port == 0) return std::nullopt; // no sane default exists

    std::string path;
    if (i < p.size() && p[i] == '/') {
        ++i;
        std::size_t path_start = i;
        while (i < p.size() && is_path_char(p[i])) ++i;
        path.assign(p.begin() + static_cast<std::ptrdiff_t>(path_start),
                    p.begin() + static_cast<std::ptrdiff_t>(i));
    }

    DownloadIntent intent;
    intent.scheme = scheme;
    intent.host = std::move(host);
    intent.port = port;
    intent.path = std::move(path);
    intent.credentials = std::move(creds);
    return intent;
}

void push_deduped(std::vector<DownloadIntent> &out, DownloadIntent &&intent) {
    for (const auto &existing : out)
        if (existing.same_target(intent)) return;
    out.push_back(std::move(intent));
}

std::vector<DownloadIntent> extract_impl(std::span<const std::uint8_t> payload,
                                         const std::string &source_record, bool xor_guard,
                                         std::uint8_t xor_key) {
    std::vector<DownloadIntent> out;
    for (std::size_t pos = 0; pos < payload.size(); ++pos) {
        for (const auto &tok : kSchemes) {
            if (!marker_at(payload, pos, tok.marker)) continue;
            // "ftp://" inside "tftp://" is not maximal; tftp is the only
            // supported scheme with another scheme as a suffix.
            if (tok.scheme == Scheme::ftp && pos > 0 && payload[pos - 1] == 't' &&
                marker_at(payload, pos - 1, "tftp://"))
                continue;
            auto intent = parse_candidate(payload, pos + tok.marker.size(), tok.scheme);
            if (!intent) continue;
            if (xor_guard) {
                if (pos > 0 && is_alnum(payload[pos - 1])) continue;
                if (!is_plausible_host(intent->host)) continue;
            }
            intent->discovered_via =
                xor_guard ? DiscoveredVia::xored(xor_key) : DiscoveredVia::plaintext();
            intent->source_record = source_record;
            push_deduped(out, std::move(*intent));
        }
    }
    return out;
}

} // namespace

bool is_plausible_host(std::string_view host) {
    if (host.empty() || host.size() > 253) return false;
    if (parse_ipv4(host)) return true;
    std::size_t label_start = 0;
    for (std::size_t i = 0; i <= host.size(); ++i) {
        if (i == host.size() || host[i] == '.') {
            std::size_t len = i - label_start;
            if (len == 0 || len > 63) return false;
            if (!is_alnum(static_cast<std::uint8_t>(host[label_start])) ||
                !is_alnum(static_cast<std::uint8_t>(host[i - 1])))
                return false;
            label_start = i + 1;
        } else if (!is_alnum(static_cast<std::uint8_t>(host[i])) && host[i] != '-') {
            return false;
        }
    }
    return true;
}

std::vector<DownloadIntent> extract_urls(std::span<const std::uint8_t> payload,
                                         const std::string &source_record) {
    return extract_impl(payload, source_record, false, 0);
}

std::vector<DownloadIntent> xor_sweep(std::span<const std::uint8_t> payload,
                                      const std::string &source_record) {
    std::vector<DownloadIntent> out;
    Bytes decoded(payload.size());
    for (unsigned key = 1; key <= 255; ++key) {
        for (std::size_t i = 0; i < payload.size(); ++i)
            decoded[i] = payload[i] ^ static_cast<std::uint8_t>(key);
        auto found = extract_impl(decoded, source_record, true, static_cast<std::uint8_t>(key));
        for (auto &intent : found) push_deduped(out, std::move(intent));
    }
    return out;
}

std::optional<DownloadIntent> detect_connectback(const ConnectionRecord &record,
                                                 const ConnectbackSlot &slot) {
    const Bytes &in = record.inbound_bytes;
    if (in.size() < slot.ip_offset + 4 || in.size() < slot.port_offset + 2) return std::nullopt;
    std::uint32_t ip = static_cast<std::uint32_t>(in[slot.ip_offset]) << 24 |
                       static_cast<std::uint32_t>(in[slot.ip_offset + 1]) << 16 |
                       static_cast<std::uint32_t>(in[slot.ip_offset + 2]) << 8 |
                       static_cast<std::uint32_t>(in[slot.ip_offset + 3]);
    std::uint16_t port = static_cast<std::uint16_t>(static_cast<std::uint16_t>(in[slot.port_offset]) << 8 |
                                                    in[slot.port_offset + 1]);
    DownloadIntent intent;
    intent.scheme = Scheme::creceive;
    intent.host = format_ipv4(Ipv4{ip});
    intent.port = port;
    intent.path = "0";
    intent.discovered_via = DiscoveredVia::connectback();
    intent.source_record = record.record_id;
    return intent;
}

} // namespace nectar
