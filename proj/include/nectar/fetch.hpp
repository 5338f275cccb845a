#pragma once

#include <chrono>
#include <functional>

#include "nectar/capture.hpp"
#include "nectar/download_log.hpp"
#include "nectar/intent.hpp"

namespace nectar {

enum class FetchStatus {
    ok,
    invalid_target,   // 0.0.0.0, port 0, unresolvable host
    connect_timeout,
    connect_error,    // refused / unreachable
    transfer_timeout,
    protocol_error,   // malformed or negative server response
    empty_body,       // 0 bytes received counts as failure
};

std::string_view fetch_status_name(FetchStatus s);

struct FetchOptions {
    std::uint64_t fetch_cap = 8 << 20; // 8 MiB
    std::chrono::milliseconds connect_timeout{5000};
    std::chrono::milliseconds transfer_timeout{30000};
    int http_max_redirects = 3;
    int tftp_tries = 3; // per-block attempts
    std::chrono::milliseconds tftp_retransmit{2000};
};

struct FetchResult {
    FetchStatus status = FetchStatus::protocol_error;
    Bytes body;
    bool truncated = false; // fetch cap stopped the transfer
    std::string detail;

    bool ok() const { return status == FetchStatus::ok; }
};

// Context for the one download-log entry emitted per fetch attempt.
struct FetchLog {
    Ipv4 src_ip;
    Ipv4 dst_ip;
    std::function<UtcTime()> clock;                    // defaults to now_utc
    std::function<void(const DownloadLogEntry &)> sink; // may be empty
};

// Dispatches on intent.scheme. Exactly one download-log entry goes to
// log.sink per call, success or failure.
FetchResult fetch(const DownloadIntent &intent, const FetchOptions &opts, const FetchLog &log);

// Protocol routines. Callers normally go through fetch().
FetchResult fetch_http(const DownloadIntent &intent, const FetchOptions &opts);
FetchResult fetch_ftp(const DownloadIntent &intent, const FetchOptions &opts);
FetchResult fetch_tftp(const DownloadIntent &intent, const FetchOptions &opts);
FetchResult fetch_creceive(const DownloadIntent &intent, const FetchOptions &opts);

} // namespace nectar
