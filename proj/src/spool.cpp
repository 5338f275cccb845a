#include "nectar/spool.hpp"

#include <algorithm>
#include <fstream>

#include "nectar/json_codec.hpp"

namespace nectar {

namespace fs = std::filesystem;

Spool::Spool(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create spool dir " + dir_.string() + ": " + ec.message());
}

void Spool::append_line(const std::string &prefix, UtcTime t, const std::string &line) {
    fs::path file = dir_ / (prefix + "-" + format_day(day_of(t)) + (prefix == "records" ? ".jsonl" : ".log"));
    std::lock_guard lock(mu_);
    std::ofstream out(file, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot open spool file " + file.string());
    out << line << "\n";
    out.flush();
}

void Spool::append_record(const ConnectionRecord &rec) {
    append_line("records", rec.started_at, record_to_json(rec).dump());
}

void Spool::append_download_log(const DownloadLogEntry &entry) {
    append_line("downloads", entry.timestamp, format_download_log(entry));
}

static std::vector<fs::path> sorted_files(const fs::path &dir, const std::string &prefix) {
    std::vector<fs::path> files;
    if (!fs::exists(dir)) return files;
    for (const auto &e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename().string().rfind(prefix, 0) == 0)
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<ConnectionRecord> Spool::read_records(const fs::path &dir) {
    std::vector<ConnectionRecord> out;
    for (const auto &file : sorted_files(dir, "records-")) {
        std::ifstream in(file, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        }
    }
    return out;
}

std::vector<DownloadLogEntry> Spool::read_download_log(const fs::path &dir) {
    std::vector<DownloadLogEntry> out;
    for (const auto &file : sorted_files(dir, "downloads-")) {
        std::ifstream in(file, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto entry = parse_download_log(line);
            if (entry) out.push_back(*entry);
        }
    }
    return out;
}

} // namespace nectar
