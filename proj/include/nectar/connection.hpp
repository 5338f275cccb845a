#pragma once

#include <string>

#include "nectar/bytes.hpp"
#include "nectar/clock.hpp"
#include "nectar/ip.hpp"

namespace nectar {

// One attacker session against an emulated service. The full inbound byte
// stream is the trace record; outbound is exactly what the dialog sent.
struct ConnectionRecord {
    std::string record_id;
    std::string sensor_id;
    SockAddr src_addr;
    SockAddr dst_addr;
    std::string service_name;
    UtcTime started_at = 0;
    Bytes inbound_bytes;
    Bytes outbound_bytes;
    bool dialog_completed = false;
    bool truncated = false; // capture cap stopped the trace

    bool operator==(const ConnectionRecord &) const = default;
};

} // namespace nectar
