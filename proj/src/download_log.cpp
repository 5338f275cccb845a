#include "nectar/download_log.hpp"

#include <stdexcept>

namespace nectar {

std::string_view scheme_name(Scheme s) {
    switch (s) {
    case Scheme::http: return "http";
    case Scheme::ftp: return "ftp";
    case Scheme::tftp: return "tftp";
    case Scheme::creceive: return "creceive";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view s) {
    if (s == "http") return Scheme::http;
    if (s == "ftp") return Scheme::ftp;
    if (s == "tftp") return Scheme::tftp;
    if (s == "creceive") return Scheme::creceive;
    return std::nullopt;
}

std::uint16_t default_port(Scheme s) {
    switch (s) {
    case Scheme::http: return 80;
    case Scheme::ftp: return 21;
    case Scheme::tftp: return 69;
    case Scheme::creceive: return 0;
    }
    return 0;
}

bool is_valid_log_url(std::string_view url) {
    auto sep = url.find("://");
    if (sep == std::string_view::npos) return false;
    if (!parse_scheme(url.substr(0, sep))) return false;
    if (sep + 3 >= url.size()) return false; // empty remainder
    for (char c : url)
        if (static_cast<unsigned char>(c) <= 0x20 || static_cast<unsigned char>(c) >= 0x7f) return false;
    return true;
}

std::string format_download_log(const DownloadLogEntry &entry) {
    if (!is_valid_log_url(entry.url)) throw std::invalid_argument("invalid download-log url: " + entry.url);
    std::string out;
    out.reserve(24 + 34 + entry.url.size());
    out.push_back('[');
    out += format_utc(entry.timestamp);
    out += "] ";
    out += format_ipv4(entry.src_ip);
    out += " -> ";
    out += format_ipv4(entry.dst_ip);
    out.push_back(' ');
    out += entry.url;
    return out;
}

std::optional<DownloadLogEntry> parse_download_log(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    // '[' + 19-char timestamp + ']'
    if (line.size() < 22 || line[0] != '[' || line[20] != ']' || line[21] != ' ') return std::nullopt;
    auto ts = parse_utc(line.substr(1, 19));
    if (!ts) return std::nullopt;
    std::size_t pos = 22;
    auto sp1 = line.find(' ', pos);
    if (sp1 == std::string_view::npos) return std::nullopt;
    auto src = parse_ipv4(line.substr(pos, sp1 - pos));
    if (!src) return std::nullopt;
    if (line.substr(sp1, 4) != " -> ") return std::nullopt;
    pos = sp1 + 4;
    auto sp2 = line.find(' ', pos);
    if (sp2 == std::string_view::npos) return std::nullopt;
    auto dst = parse_ipv4(line.substr(pos, sp2 - pos));
    if (!dst) return std::nullopt;
    std::string url(line.substr(sp2 + 1));
    if (!is_valid_log_url(url)) return std::nullopt;
    return DownloadLogEntry{*ts, *src, *dst, std::move(url)};
}

} // namespace nectar
