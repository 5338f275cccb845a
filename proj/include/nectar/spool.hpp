#pragma once

#include <filesystem>
#include <mutex>

#include "nectar/connection.hpp"
#include "nectar/download_log.hpp"

namespace nectar {

// Sensor-local persistence: append-only files per UTC day. A connection
// record is spooled before any fetch is attempted, so a crash never loses
// the trace. Files:
//   records-YYYY-MM-DD.jsonl    one JSON record per line
//   downloads-YYYY-MM-DD.log    download-log lines in the external format
class Spool {
  public:
    explicit Spool(std::filesystem::path dir); // creates dir; throws on failure

    void append_record(const ConnectionRecord &rec);
    void append_download_log(const DownloadLogEntry &entry);

    const std::filesystem::path &dir() const { return dir_; }

    static std::vector<ConnectionRecord> read_records(const std::filesystem::path &dir);
    static std::vector<DownloadLogEntry> read_download_log(const std::filesystem::path &dir);

  private:
    void append_line(const std::string &prefix, UtcTime t, const std::string &line);

    std::filesystem::path dir_;
    std::mutex mu_;
};

} // namespace nectar
