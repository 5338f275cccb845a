#include <doctest.h>

#include <random>
#include <set>

#include "nectar/bytes.hpp"
#include "nectar/clock.hpp"
#include "nectar/config_text.hpp"
#include "nectar/download_log.hpp"
#include "nectar/ip.hpp"
#include "nectar/md5.hpp"
#include "nectar/service_profile.hpp"

using namespace nectar;

TEST_CASE("hex round trip") {
    Bytes b = {0x00, 0x01, 0xab, 0xff, 0x7f};
    CHECK(to_hex(b) == "0001abff7f");
    CHECK(from_hex("0001abff7f") == b);
    CHECK(from_hex("0001ABFF7F") == b);
    CHECK_THROWS(from_hex("abc"));
    CHECK_THROWS(from_hex("zz"));
}

TEST_CASE("pattern bytes are the documented sequence") {
    Bytes p = pattern_bytes(4);
    CHECK(p[0] == 7);
    CHECK(p[1] == ((131 + 7) & 0xff));
    CHECK(p[2] == ((262 + 7) & 0xff));
}

TEST_CASE("md5 reference vectors") {
    CHECK(md5_hex(std::string_view("")) == "d41d8cd98f00b204e9800998ecf8427e");
    CHECK(md5_hex(std::string_view("abc")) == "900150983cd24fb0d6963f7d28e17f72");
    CHECK(md5_hex(std::string_view("message digest")) == "f96b697d7cb7938d525a2f31aaf161d0");
    CHECK(md5_hex(std::string_view("abcdefghijklmnopqrstuvwxyz")) == "c3fcd3d76192e4007dfb496cca67e13b");
}

TEST_CASE("md5 of deterministic patterns matches externally computed digests") {
    CHECK(md5_hex(pattern_bytes(1)) == "89e74e640b8c46257a29de0616794d5d");
    CHECK(md5_hex(pattern_bytes(511)) == "782f183cc70b795bf5713e83ca9f9481");
    CHECK(md5_hex(pattern_bytes(512)) == "d58a283d37f6a25c0db7673312c5f97a");
    CHECK(md5_hex(pattern_bytes(513)) == "a0867e98601cdd6818d37e3d86946485");
    CHECK(md5_hex(pattern_bytes(4096)) == "1b05496787e27a63f913493bfeaad6fd");
}

TEST_CASE("is_md5_hex") {
    CHECK(is_md5_hex("865915650a85e7c27cdd11850a13f86e"));
    CHECK_FALSE(is_md5_hex("865915650A85E7C27CDD11850A13F86E")); // uppercase rejected
    CHECK_FALSE(is_md5_hex("0da155b04f16dafaffbb1a485b3d0e1")); // 31 chars
}

TEST_CASE("utc format and parse") {
    auto t = parse_utc("2011-05-27T15:53:16");
    REQUIRE(t.has_value());
    CHECK(format_utc(*t) == "2011-05-27T15:53:16");
    CHECK(format_utc(0) == "1970-01-01T00:00:00");
    CHECK_FALSE(parse_utc("2011-13-01T00:00:00").has_value());
    CHECK_FALSE(parse_utc("2011-02-30T00:00:00").has_value());
    CHECK_FALSE(parse_utc("2011-05-27 15:53:16").has_value());
    CHECK_FALSE(parse_utc("2011-05-27T15:53").has_value());
    CHECK_FALSE(parse_utc("2011-05-27T24:00:00").has_value());
    // leap day
    CHECK(parse_utc("2012-02-29T12:00:00").has_value());
    CHECK_FALSE(parse_utc("2011-02-29T12:00:00").has_value());
}

TEST_CASE("utc round trip over random times") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<std::int64_t> dist(0, 4102444799); // through 2099
    for (int i = 0; i < 2000; ++i) {
        UtcTime t = dist(rng);
        auto back = parse_utc(format_utc(t));
        REQUIRE(back.has_value());
        CHECK(*back == t);
    }
}

TEST_CASE("day helpers") {
    auto d = parse_day("2011-01-01");
    REQUIRE(d.has_value());
    CHECK(format_day(*d) == "2011-01-01");
    CHECK(day_of(*parse_utc("2011-01-01T23:59:59")) == *d);
    CHECK(day_of(*parse_utc("2011-01-02T00:00:00")) == *d + 1);
}

TEST_CASE("ipv4 parse is strict") {
    CHECK(parse_ipv4("203.129.220.217")->value == 0xCB81DCD9);
    CHECK(format_ipv4(Ipv4{0xCB81DCD9}) == "203.129.220.217");
    CHECK(parse_ipv4("0.0.0.0")->value == 0u);
    CHECK_FALSE(parse_ipv4("256.1.1.1").has_value());
    CHECK_FALSE(parse_ipv4("1.2.3").has_value());
    CHECK_FALSE(parse_ipv4("1.2.3.4.5").has_value());
    CHECK_FALSE(parse_ipv4("01.2.3.4").has_value()); // leading zero
    CHECK_FALSE(parse_ipv4("1.2.3.4 ").has_value());
    CHECK_FALSE(parse_ipv4("").has_value());
}

TEST_CASE("sockaddr text form") {
    auto a = parse_sockaddr("127.0.0.1:9988");
    REQUIRE(a.has_value());
    CHECK(a->port == 9988);
    CHECK(format_sockaddr(*a) == "127.0.0.1:9988");
    CHECK_FALSE(parse_sockaddr("127.0.0.1").has_value());
    CHECK_FALSE(parse_sockaddr("127.0.0.1:70000").has_value());
}

// ---------------------------------------------------------------------------
// Download log format: the externally visible line layout.

TEST_CASE("download log golden line matches the published layout") {
    DownloadLogEntry e;
    e.timestamp = *parse_utc("2011-05-27T15:53:16");
    e.src_ip = *parse_ipv4("66.1.2.3");
    e.dst_ip = *parse_ipv4("203.4.5.6");
    e.url = "creceive://66.1.2.3:9988/0";
    CHECK(format_download_log(e) == "[2011-05-27T15:53:16] 66.1.2.3 -> 203.4.5.6 creceive://66.1.2.3:9988/0");

    auto back = parse_download_log(format_download_log(e));
    REQUIRE(back.has_value());
    CHECK(*back == e);
}

TEST_CASE("download log parses the tftp form") {
    auto e = parse_download_log("[2011-05-28T12:03:57] 203.9.9.9 -> 203.8.8.8 tftp://203.111.222.65/host.exe");
    REQUIRE(e.has_value());
    CHECK(format_utc(e->timestamp) == "2011-05-28T12:03:57");
    CHECK(format_ipv4(e->src_ip) == "203.9.9.9");
    CHECK(format_ipv4(e->dst_ip) == "203.8.8.8");
    CHECK(e->url == "tftp://203.111.222.65/host.exe");
    CHECK(e->url.substr(0, 4) == "tftp");
    CHECK(e->url.substr(e->url.rfind('/') + 1) == "host.exe");
}

TEST_CASE("download log rejects malformed lines") {
    CHECK_FALSE(parse_download_log("").has_value());
    CHECK_FALSE(parse_download_log("2011-05-27T15:53:16 66.1.2.3 -> 1.2.3.4 http://x/").has_value());
    CHECK_FALSE(parse_download_log("[2011-05-27T15:53:16] 66.1.2.3 => 1.2.3.4 http://x/").has_value());
    CHECK_FALSE(parse_download_log("[2011-05-27T15:53:16] 66.1.2.3 -> 1.2.3.4 gopher://x/").has_value());
    CHECK_FALSE(parse_download_log("[2011-05-27T15:53:16] 66.1.2.3 -> 1.2.3.4").has_value());
    CHECK_FALSE(parse_download_log("[2011-05-27T15:53:16] 66.1.2.999 -> 1.2.3.4 http://x/").has_value());
    CHECK_FALSE(parse_download_log("[2011-05-27T99:53:16] 66.1.2.3 -> 1.2.3.4 http://x/").has_value());
}

DownloadLogEntry random_log_entry(std::mt19937 &rng) {
    static const char *kSchemes[] = {"http", "ftp", "tftp", "creceive"};
    static const char kHostChars[] = "abcdefghijklmnopqrstuvwxyz0123456789.-";
    static const char kPathChars[] = "abcdefghijklmnopqrstuvwxyz0123456789._-/=%&?";
    std::uniform_int_distribution<std::int64_t> ts(0, 4102444799);
    std::uniform_int_distribution<std::uint32_t> ip;
    std::uniform_int_distribution<int> sch(0, 3), hostlen(1, 20), pathlen(0, 24), pct(0, 99);
    DownloadLogEntry e;
    e.timestamp = ts(rng);
    e.src_ip = Ipv4{ip(rng)};
    e.dst_ip = Ipv4{ip(rng)};
    std::string url = kSchemes[sch(rng)];
    url += "://";
    int hl = hostlen(rng);
    for (int i = 0; i < hl; ++i) url += kHostChars[rng() % (sizeof(kHostChars) - 1)];
    if (pct(rng) < 40) url += ":" + std::to_string(1 + rng() % 65535);
    if (pct(rng) < 70) {
        url += "/";
        int pl = pathlen(rng);
        for (int i = 0; i < pl; ++i) url += kPathChars[rng() % (sizeof(kPathChars) - 1)];
    }
    e.url = url;
    return e;
}

TEST_CASE("download log round-trips 1000 randomized entries") {
    std::mt19937 rng(20110527);
    for (int i = 0; i < 1000; ++i) {
        DownloadLogEntry e = random_log_entry(rng);
        auto back = parse_download_log(format_download_log(e));
        REQUIRE(back.has_value());
        CHECK(*back == e);
    }
}

// ---------------------------------------------------------------------------
// Service profiles.

TEST_CASE("minimal profile") {
    auto services = parse_service_profiles("service backdoor9988 {\n  port 9988\n  capture until_close\n}\n");
    REQUIRE(services.size() == 1);
    CHECK(services[0].name == "backdoor9988");
    CHECK(services[0].port == 9988);
    CHECK(services[0].dialog.empty());
    CHECK(services[0].capture.kind == CaptureMode::Kind::until_close);
}

TEST_CASE("duplicate ports are rejected") {
    const char *text = "service a { port 445 }\nservice b { port 445 }\n";
    CHECK_THROWS_AS(parse_service_profiles(text), ConfigError);
}

TEST_CASE("parse errors carry line information") {
    try {
        parse_service_profiles("service a {\n  porf 1\n}\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("dialog profile round-trips field by field") {
    EmulatedService expected;
    expected.name = "shellemu";
    expected.port = 1337;
    expected.dialog = {
        {DialogStep::Kind::send, to_bytes("220 ready\r\n"), 0},
        {DialogStep::Kind::expect, to_bytes("RUN"), 5},
    };
    expected.capture = CaptureMode::after_trigger(to_bytes("RUN"));

    auto parsed = parse_service_profiles(serialize_service(expected));
    REQUIRE(parsed.size() == 1);
    const auto &got = parsed[0];
    CHECK(got.name == expected.name);
    CHECK(got.port == expected.port);
    REQUIRE(got.dialog.size() == 2);
    CHECK(got.dialog[0].kind == DialogStep::Kind::send);
    CHECK(got.dialog[0].payload == expected.dialog[0].payload);
    CHECK(got.dialog[1].kind == DialogStep::Kind::expect);
    CHECK(got.dialog[1].payload == expected.dialog[1].payload);
    CHECK(got.dialog[1].timeout_s == expected.dialog[1].timeout_s);
    CHECK(got.capture == expected.capture);
    CHECK_FALSE(got.connectback.has_value());
}

TEST_CASE("empty dialog with non-until_close capture violates the invariant") {
    CHECK_THROWS_AS(parse_service_profiles("service x { port 1 capture fixed_length 10 }"), ConfigError);
}

EmulatedService random_service(std::mt19937 &rng, int idx) {
    std::uniform_int_distribution<int> coin(0, 1), nsteps(1, 5), blen(1, 24), mode(0, 2);
    EmulatedService svc;
    svc.name = "svc" + std::to_string(idx);
    svc.port = static_cast<std::uint16_t>(1 + rng() % 65535);
    int steps = nsteps(rng);
    for (int i = 0; i < steps; ++i) {
        DialogStep step;
        Bytes payload(static_cast<std::size_t>(blen(rng)));
        for (auto &b : payload) b = static_cast<std::uint8_t>(rng());
        step.payload = std::move(payload);
        if (coin(rng)) {
            step.kind = DialogStep::Kind::expect;
            step.timeout_s = 1 + static_cast<double>(rng() % 10);
        } else {
            step.kind = DialogStep::Kind::send;
            step.timeout_s = 0;
        }
        svc.dialog.push_back(std::move(step));
    }
    switch (mode(rng)) {
    case 0: svc.capture = CaptureMode::until_close(); break;
    case 1: svc.capture = CaptureMode::fixed_length(rng() % 100000); break;
    default: {
        Bytes trig(1 + rng() % 8);
        for (auto &b : trig) b = static_cast<std::uint8_t>(rng());
        svc.capture = CaptureMode::after_trigger(std::move(trig));
    }
    }
    if (coin(rng)) svc.connectback = ConnectbackSlot{rng() % 64, rng() % 64};
    return svc;
}

TEST_CASE("profile serializer and parser are inverse over random profiles") {
    std::mt19937 rng(99);
    for (int round = 0; round < 50; ++round) {
        std::vector<EmulatedService> services;
        std::set<std::uint16_t> used;
        for (int i = 0; i < 4; ++i) {
            EmulatedService svc = random_service(rng, i);
            if (!used.insert(svc.port).second) continue;
            services.push_back(std::move(svc));
        }
        auto back = parse_service_profiles(serialize_service_profiles(services));
        REQUIRE(back.size() == services.size());
        for (std::size_t i = 0; i < services.size(); ++i) CHECK(back[i] == services[i]);
    }
}

TEST_CASE("config strings survive arbitrary bytes") {
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        Bytes payload(rng() % 64);
        for (auto &b : payload) b = static_cast<std::uint8_t>(rng());
        std::string quoted = quote_config_string(payload);
        TokenStream ts(quoted);
        CHECK(ts.expect_string_bytes("payload") == payload);
    }
}
