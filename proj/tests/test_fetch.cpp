#include <doctest.h>

#include <thread>

#include "nectar/fetch.hpp"
#include "nectar/harness_servers.hpp"
#include "nectar/md5.hpp"
#include "nectar/net.hpp"

using namespace nectar;
using namespace nectar::harness;

namespace {

DownloadIntent intent_for(Scheme scheme, std::uint16_t port, const std::string &path) {
    DownloadIntent i;
    i.scheme = scheme;
    i.host = "127.0.0.1";
    i.port = port;
    i.path = path;
    i.source_record = "r";
    return i;
}

FetchOptions fast_opts() {
    FetchOptions o;
    o.connect_timeout = std::chrono::milliseconds(2000);
    o.transfer_timeout = std::chrono::milliseconds(10000);
    o.tftp_retransmit = std::chrono::milliseconds(300);
    return o;
}

} // namespace

TEST_CASE("tftp fetch matches the externally computed digest") {
    auto server = serve_payload({Scheme::tftp, 0, {{"host.exe", pattern_bytes(4096)}}, {}, {}});
    auto result = fetch_tftp(intent_for(Scheme::tftp, server->port(), "host.exe"), fast_opts());
    REQUIRE(result.ok());
    CHECK(result.body.size() == 4096);
    // digest frozen from an external tool before the implementation existed
    CHECK(md5_hex(result.body) == "1b05496787e27a63f913493bfeaad6fd");
}

TEST_CASE("fetch rejects the invalid connect-back target") {
    DownloadIntent bad = intent_for(Scheme::creceive, 0, "0");
    bad.host = "0.0.0.0";
    int log_lines = 0;
    FetchLog log;
    log.sink = [&](const DownloadLogEntry &) { ++log_lines; };
    log.src_ip = *parse_ipv4("10.0.0.2");
    log.dst_ip = *parse_ipv4("10.0.0.1");
    auto result = fetch(bad, fast_opts(), log);
    CHECK(result.status == FetchStatus::invalid_target);
    CHECK(log_lines == 1); // failures still log exactly once
}

TEST_CASE("http 404 is a protocol error with no capture") {
    auto server = serve_payload({Scheme::http, 0, {{"present.exe", pattern_bytes(10)}}, {}, {}});
    auto result = fetch_http(intent_for(Scheme::http, server->port(), "missing.exe"), fast_opts());
    CHECK(result.status == FetchStatus::protocol_error);
    CHECK(result.body.empty());
}

TEST_CASE("served bytes round-trip exactly on every scheme") {
    Bytes blob = pattern_bytes(513);
    for (Scheme scheme : {Scheme::http, Scheme::ftp, Scheme::tftp, Scheme::creceive}) {
        CAPTURE(scheme_name(scheme));
        auto server = serve_payload({scheme, 0, {{"host.exe", blob}}, {}, {}});
        auto result = fetch(intent_for(scheme, server->port(), "host.exe"), fast_opts(), {});
        REQUIRE(result.ok());
        CHECK(result.body == blob);
        CHECK_FALSE(result.truncated);
    }
}

TEST_CASE("immediate close yields empty-body") {
    // creceive server with a zero-length blob writes nothing and closes
    auto server = serve_payload({Scheme::creceive, 0, {{"0", Bytes{}}}, {}, {}});
    auto result = fetch_creceive(intent_for(Scheme::creceive, server->port(), "0"), fast_opts());
    CHECK(result.status == FetchStatus::empty_body);
}

TEST_CASE("connection refused maps to a connect error") {
    TcpListener probe = TcpListener::bind(Ipv4::loopback(), 0);
    std::uint16_t dead_port = probe.port();
    probe.close(); // now nothing listens there
    auto result = fetch_http(intent_for(Scheme::http, dead_port, "x"), fast_opts());
    CHECK(result.status == FetchStatus::connect_error);
}

TEST_CASE("one MiB tftp transfer is 2048 full blocks plus an empty final block") {
    Bytes blob = pattern_bytes(1 << 20);
    auto server = serve_payload({Scheme::tftp, 0, {{"big.bin", blob}}, {}, {}});
    auto result = fetch_tftp(intent_for(Scheme::tftp, server->port(), "big.bin"), fast_opts());
    REQUIRE(result.ok());
    CHECK(result.body.size() == (1 << 20));
    CHECK(md5_hex(result.body) == "b1e1aed0deadc10e54f181a82efd15e8"); // frozen externally
    // ceil arithmetic: 1 MiB / 512 = 2048 exactly, so termination needs one
    // extra zero-length DATA block; loopback is lossless so no retransmits.
    CHECK(server->data_packets_sent() == 2049);
}

TEST_CASE("duplicate DATA blocks do not corrupt the reassembled file") {
    Bytes blob = pattern_bytes(4096);
    auto server = serve_payload({Scheme::tftp, 0, {{"host.exe", blob}}, Misbehavior::duplicate_block(), {}});
    auto result = fetch_tftp(intent_for(Scheme::tftp, server->port(), "host.exe"), fast_opts());
    REQUIRE(result.ok());
    CHECK(result.body == blob);
}

TEST_CASE("tftp file-not-found surfaces the server ERROR packet") {
    auto server = serve_payload({Scheme::tftp, 0, {{"a", pattern_bytes(1)}}, {}, {}});
    auto result = fetch_tftp(intent_for(Scheme::tftp, server->port(), "nope"), fast_opts());
    CHECK(result.status == FetchStatus::protocol_error);
}

TEST_CASE("tftp client retransmits the RRQ when the first one is dropped") {
    UdpSocket sloppy = UdpSocket::bind(Ipv4::loopback(), 0);
    std::uint16_t port = sloppy.port();
    std::jthread server([&] {
        Bytes pkt;
        SockAddr client;
        // swallow the first RRQ
        if (sloppy.recv_from(pkt, client, Deadline::in_ms(3000)) != IoStatus::ok) return;
        // answer the retransmitted one with a single short block
        if (sloppy.recv_from(pkt, client, Deadline::in_ms(3000)) != IoStatus::ok) return;
        Bytes data = {0, 3, 0, 1, 'h', 'i'};
        sloppy.send_to(data, client);
        sloppy.recv_from(pkt, client, Deadline::in_ms(3000)); // final ACK
    });
    auto result = fetch_tftp(intent_for(Scheme::tftp, port, "x"), fast_opts());
    REQUIRE(result.ok());
    CHECK(to_string(result.body) == "hi");
}

TEST_CASE("tftp transfer gives up after the configured tries") {
    UdpSocket silent = UdpSocket::bind(Ipv4::loopback(), 0);
    FetchOptions opts = fast_opts();
    opts.tftp_retransmit = std::chrono::milliseconds(100);
    auto result = fetch_tftp(intent_for(Scheme::tftp, silent.port(), "x"), opts);
    CHECK(result.status == FetchStatus::transfer_timeout);
}

TEST_CASE("short http body is a protocol error, not a capture") {
    auto server = serve_payload(
        {Scheme::http, 0, {{"big.bin", pattern_bytes(4096)}}, Misbehavior::close_early(100), {}});
    auto result = fetch_http(intent_for(Scheme::http, server->port(), "big.bin"), fast_opts());
    CHECK(result.status == FetchStatus::protocol_error);
}

TEST_CASE("ftp close_early aborts via 426") {
    auto server =
        serve_payload({Scheme::ftp, 0, {{"big.bin", pattern_bytes(4096)}}, Misbehavior::close_early(64), {}});
    auto result = fetch_ftp(intent_for(Scheme::ftp, server->port(), "big.bin"), fast_opts());
    CHECK(result.status == FetchStatus::protocol_error);
}

TEST_CASE("http redirects are followed up to the limit") {
    PayloadServerConfig config;
    config.scheme = Scheme::http;
    config.files = {{"final.bin", pattern_bytes(64)}};
    config.http_redirects = {{"hop1", "/hop2"}, {"hop2", "/final.bin"}};
    auto server = serve_payload(std::move(config));
    auto result = fetch_http(intent_for(Scheme::http, server->port(), "hop1"), fast_opts());
    REQUIRE(result.ok());
    CHECK(result.body == pattern_bytes(64));
}

TEST_CASE("more than three redirects fail") {
    PayloadServerConfig config;
    config.scheme = Scheme::http;
    config.files = {{"final.bin", pattern_bytes(8)}};
    config.http_redirects = {
        {"hop1", "/hop2"}, {"hop2", "/hop3"}, {"hop3", "/hop4"}, {"hop4", "/final.bin"}};
    auto server = serve_payload(std::move(config));
    auto result = fetch_http(intent_for(Scheme::http, server->port(), "hop1"), fast_opts());
    CHECK(result.status == FetchStatus::protocol_error);
}

TEST_CASE("cross-scheme redirects are refused") {
    PayloadServerConfig config;
    config.scheme = Scheme::http;
    config.http_redirects = {{"hop1", "ftp://127.0.0.1:21/x"}};
    auto server = serve_payload(std::move(config));
    auto result = fetch_http(intent_for(Scheme::http, server->port(), "hop1"), fast_opts());
    CHECK(result.status == FetchStatus::protocol_error);
}

TEST_CASE("ftp honors explicit credentials and anonymous default") {
    auto server = serve_payload({Scheme::ftp, 0, {{"host.exe", pattern_bytes(256)}}, {}, {}});
    DownloadIntent with_creds = intent_for(Scheme::ftp, server->port(), "host.exe");
    with_creds.credentials = Credentials{"1", "1"};
    auto a = fetch_ftp(with_creds, fast_opts());
    REQUIRE(a.ok());
    auto b = fetch_ftp(intent_for(Scheme::ftp, server->port(), "host.exe"), fast_opts());
    REQUIRE(b.ok());
    CHECK(a.body == b.body);
}

TEST_CASE("ftp missing file is a protocol error") {
    auto server = serve_payload({Scheme::ftp, 0, {{"a", pattern_bytes(1)}}, {}, {}});
    auto result = fetch_ftp(intent_for(Scheme::ftp, server->port(), "nope"), fast_opts());
    CHECK(result.status == FetchStatus::protocol_error);
}

TEST_CASE("fetch cap truncates and flags the capture") {
    FetchOptions opts = fast_opts();
    opts.fetch_cap = 1024;
    auto server = serve_payload({Scheme::creceive, 0, {{"0", pattern_bytes(5000)}}, {}, {}});
    auto result = fetch_creceive(intent_for(Scheme::creceive, server->port(), "0"), opts);
    REQUIRE(result.ok());
    CHECK(result.truncated);
    CHECK(result.body.size() == 1024);
    CHECK(result.body == pattern_bytes(1024));
}

TEST_CASE("every fetch attempt emits exactly one download-log line") {
    auto server = serve_payload({Scheme::http, 0, {{"x", pattern_bytes(16)}}, {}, {}});
    std::vector<DownloadLogEntry> lines;
    FetchLog log;
    log.src_ip = *parse_ipv4("66.1.2.3");
    log.dst_ip = *parse_ipv4("127.0.0.1");
    log.clock = [] { return *parse_utc("2011-05-27T15:53:16"); };
    log.sink = [&](const DownloadLogEntry &e) { lines.push_back(e); };

    fetch(intent_for(Scheme::http, server->port(), "x"), fast_opts(), log);     // success
    fetch(intent_for(Scheme::http, server->port(), "nope"), fast_opts(), log);  // 404
    REQUIRE(lines.size() == 2);
    CHECK(format_download_log(lines[0]) ==
          "[2011-05-27T15:53:16] 66.1.2.3 -> 127.0.0.1 http://127.0.0.1:" + std::to_string(server->port()) +
              "/x");
    // both parse under the grammar
    for (const auto &e : lines) CHECK(parse_download_log(format_download_log(e)).has_value());
}

TEST_CASE("capture verifies against its own digest") {
    auto cap = BinaryCapture::make(pattern_bytes(100), intent_for(Scheme::http, 80, "x"), "n1",
                                   *parse_utc("2011-01-01T00:00:00"));
    CHECK(cap.verify());
    CHECK(cap.size_bytes == 100);
    BinaryCapture tampered = cap;
    tampered.payload[0] ^= 0xff;
    CHECK_FALSE(tampered.verify());
}
