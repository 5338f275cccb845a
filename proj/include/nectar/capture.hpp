#pragma once

#include "nectar/connection.hpp"
#include "nectar/intent.hpp"
#include "nectar/md5.hpp"

namespace nectar {

// A fetched binary plus its provenance. md5_hex is always recomputable from
// payload; a capture whose digest does not match is rejected downstream.
struct BinaryCapture {
    std::string md5;
    std::uint64_t size_bytes = 0;
    Bytes payload;
    DownloadIntent fetched_from;
    std::string sensor_id;
    UtcTime fetched_at = 0;
    bool truncated = false; // fetch cap stopped the transfer

    static BinaryCapture make(Bytes payload, DownloadIntent from, std::string sensor_id, UtcTime at,
                              bool truncated = false) {
        BinaryCapture c;
        c.md5 = md5_hex(payload);
        c.size_bytes = payload.size();
        c.payload = std::move(payload);
        c.fetched_from = std::move(from);
        c.sensor_id = std::move(sensor_id);
        c.fetched_at = at;
        c.truncated = truncated;
        return c;
    }

    bool verify() const { return size_bytes == payload.size() && md5 == md5_hex(payload); }

    bool operator==(const BinaryCapture &) const = default;
};

// The unit shipped sensor -> collector.
struct SensorReport {
    std::string node_id;
    std::string event_id; // "<node_id>#<seq>", unique per sensor process
    ConnectionRecord connection;
    std::vector<DownloadIntent> intents;
    std::vector<BinaryCapture> captures;
    std::vector<std::string> download_log_lines;

    bool operator==(const SensorReport &) const = default;
};

} // namespace nectar
