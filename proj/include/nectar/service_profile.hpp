#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nectar/bytes.hpp"
#include "nectar/config_text.hpp"

namespace nectar {

struct DialogStep {
    enum class Kind { send, expect };
    Kind kind = Kind::send;
    Bytes payload;          // send: bytes written; expect: pattern searched for
    double timeout_s = 5.0; // expect only

    bool operator==(const DialogStep &) const = default;
};

struct CaptureMode {
    enum class Kind { until_close, fixed_length, after_trigger };
    Kind kind = Kind::until_close;
    std::uint64_t length = 0; // fixed_length: stop once inbound reaches this many bytes
    Bytes trigger;            // after_trigger: wait for this pattern, then read until close

    static CaptureMode until_close() { return {}; }
    static CaptureMode fixed_length(std::uint64_t n) { return {Kind::fixed_length, n, {}}; }
    static CaptureMode after_trigger(Bytes pat) { return {Kind::after_trigger, 0, std::move(pat)}; }

    bool operator==(const CaptureMode &) const = default;
};

// Byte offsets within inbound_bytes where a connect-back target is encoded:
// 4-byte big-endian IPv4 at ip_offset, 2-byte big-endian port at port_offset.
struct ConnectbackSlot {
    std::uint64_t ip_offset = 0;
    std::uint64_t port_offset = 0;

    bool operator==(const ConnectbackSlot &) const = default;
};

struct EmulatedService {
    std::string name;
    std::uint16_t port = 0;
    std::vector<DialogStep> dialog;
    CaptureMode capture;
    std::optional<ConnectbackSlot> connectback;

    bool operator==(const EmulatedService &) const = default;

    // Throws ConfigError on invariant violations (port 0, or a non-until_close
    // capture mode with an empty dialog).
    void validate() const;
};

// Parses one "service <name> { ... }" block; the leading keyword must be next.
EmulatedService parse_service_block(TokenStream &ts);

std::vector<EmulatedService> parse_service_profiles(std::string_view text);
std::vector<EmulatedService> load_service_profiles(const std::filesystem::path &path);

std::string serialize_service(const EmulatedService &svc);
std::string serialize_service_profiles(const std::vector<EmulatedService> &services);

} // namespace nectar
