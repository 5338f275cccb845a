#pragma once

#include <chrono>

#include "nectar/connection.hpp"
#include "nectar/net.hpp"
#include "nectar/service_profile.hpp"

namespace nectar {

struct DialogOptions {
    std::uint64_t capture_cap = 1 << 20; // 1 MiB per connection
    std::chrono::milliseconds idle_timeout{30000}; // capture-phase read gap limit
    std::chrono::milliseconds send_timeout{5000};
};

struct DialogContext {
    std::string record_id;
    std::string sensor_id;
    SockAddr peer;
    SockAddr local;
    UtcTime started_at = 0;
};

// Plays the service's scripted dialog over the stream and captures the full
// inbound byte trace. Expect patterns are literal substring searches over the
// accumulated inbound buffer. Always returns a record; on an Expect timeout
// the partial record has dialog_completed=false.
ConnectionRecord run_dialog(const EmulatedService &service, TcpStream &stream, const DialogContext &ctx,
                            const DialogOptions &opts = {});

} // namespace nectar
