#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nectar/ip.hpp"

namespace nectar {

// Static prefix -> country attribution. CSV rows are `a.b.c.d/len,CC`;
// longest prefix wins; unknown addresses map to "--".
class GeoTable {
  public:
    static constexpr const char *kUnknown = "--";

    GeoTable() = default;
    static GeoTable parse_csv(std::string_view text); // throws std::runtime_error on malformed rows
    static GeoTable load_csv(const std::filesystem::path &path);

    void add(Ipv4 prefix, int prefix_len, std::string country);
    std::string lookup(Ipv4 ip) const;
    bool empty() const { return rows_.empty(); }
    std::size_t size() const { return rows_.size(); }

  private:
    struct Row {
        std::uint32_t value;
        std::uint32_t mask;
        int len;
        std::string country;
    };
    std::vector<Row> rows_;
};

} // namespace nectar
