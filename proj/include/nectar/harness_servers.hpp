#pragma once

#include <chrono>
#include <map>
#include <memory>

#include "nectar/bytes.hpp"
#include "nectar/download_log.hpp"

namespace nectar::harness {

// Failure injection for payload servers.
struct Misbehavior {
    enum class Kind { none, close_early, duplicate_block, slow };
    Kind kind = Kind::none;
    std::uint64_t close_after = 100;     // close_early: body bytes served before closing
    std::chrono::milliseconds delay{50}; // slow: pause between chunks/blocks

    static Misbehavior none() { return {}; }
    static Misbehavior close_early(std::uint64_t after) { return {Kind::close_early, after, {}}; }
    static Misbehavior duplicate_block() { return {Kind::duplicate_block, 0, {}}; }
    static Misbehavior slow(std::chrono::milliseconds d) { return {Kind::slow, 0, d}; }
};

using FileMap = std::map<std::string, Bytes>; // path (no leading '/') -> content

struct PayloadServerConfig {
    Scheme scheme = Scheme::http;
    std::uint16_t port = 0; // 0 = ephemeral
    FileMap files;
    Misbehavior misbehavior;
    std::map<std::string, std::string> http_redirects; // path -> Location header
};

// Minimal loopback-only servers: HTTP/1.1 GET, FTP (PASV+RETR), TFTP (RFC
// 1350 read), and a creceive pusher that writes its blob and closes. Small by
// design, but protocol-correct enough to interoperate with stock clients.
class PayloadServer {
  public:
    virtual ~PayloadServer() = default;
    virtual std::uint16_t port() const = 0;
    virtual void stop() = 0;
    // TFTP only: DATA packets sent so far (retransmits included).
    virtual std::uint64_t data_packets_sent() const { return 0; }
};

// Binds 127.0.0.1:<port> and serves until stop() or destruction.
// Throws std::runtime_error when the port cannot be bound.
std::unique_ptr<PayloadServer> serve_payload(PayloadServerConfig config);

} // namespace nectar::harness
