#include "nectar/geo.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nectar {

void GeoTable::add(Ipv4 prefix, int prefix_len, std::string country) {
    if (prefix_len < 0 || prefix_len > 32) throw std::runtime_error("prefix length out of range");
    std::uint32_t mask = prefix_len == 0 ? 0 : ~std::uint32_t{0} << (32 - prefix_len);
    rows_.push_back(Row{prefix.value & mask, mask, prefix_len, std::move(country)});
}

std::string GeoTable::lookup(Ipv4 ip) const {
    const Row *best = nullptr;
    for (const auto &row : rows_)
        if ((ip.value & row.mask) == row.value && (!best || row.len > best->len)) best = &row;
    return best ? best->country : kUnknown;
}

GeoTable GeoTable::parse_csv(std::string_view text) {
    GeoTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto bad = [&](const std::string &why) {
            return std::runtime_error("geo table line " + std::to_string(lineno) + ": " + why);
        };
        auto comma = line.find(',');
        if (comma == std::string::npos) throw bad("expected prefix,country");
        std::string prefix_text = line.substr(0, comma);
        std::string country = line.substr(comma + 1);
        if (country.empty()) throw bad("empty country code");
        auto slash = prefix_text.find('/');
        if (slash == std::string::npos) throw bad("prefix must be a.b.c.d/len");
        auto ip = parse_ipv4(prefix_text.substr(0, slash));
        if (!ip) throw bad("bad prefix address");
        int len;
        try {
            std::size_t used = 0;
            len = std::stoi(prefix_text.substr(slash + 1), &used);
            if (used != prefix_text.size() - slash - 1) throw std::invalid_argument("");
        } catch (const std::exception &) {
            throw bad("bad prefix length");
        }
        if (len < 0 || len > 32) throw bad("prefix length out of range");
        table.add(*ip, len, country);
    }
    return table;
}

GeoTable GeoTable::load_csv(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open geo table: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

} // namespace nectar
