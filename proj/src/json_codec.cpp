#include "nectar/json_codec.hpp"

namespace nectar {

using nlohmann::json;

namespace {

const json &field(const json &j, const char *name) {
    auto it = j.find(name);
    if (it == j.end()) throw CodecError(std::string("missing field: ") + name);
    return *it;
}

std::string str_field(const json &j, const char *name) {
    const json &f = field(j, name);
    if (!f.is_string()) throw CodecError(std::string("field is not a string: ") + name);
    return f.get<std::string>();
}

std::uint64_t uint_field(const json &j, const char *name) {
    const json &f = field(j, name);
    if (!f.is_number_unsigned() && !f.is_number_integer())
        throw CodecError(std::string("field is not an integer: ") + name);
    auto v = f.get<std::int64_t>();
    if (v < 0) throw CodecError(std::string("field is negative: ") + name);
    return static_cast<std::uint64_t>(v);
}

bool bool_field(const json &j, const char *name) {
    const json &f = field(j, name);
    if (!f.is_boolean()) throw CodecError(std::string("field is not a bool: ") + name);
    return f.get<bool>();
}

UtcTime time_field(const json &j, const char *name) {
    auto t = parse_utc(str_field(j, name));
    if (!t) throw CodecError(std::string("bad timestamp in field: ") + name);
    return *t;
}

SockAddr addr_field(const json &j, const char *name) {
    auto a = parse_sockaddr(str_field(j, name));
    if (!a) throw CodecError(std::string("bad address in field: ") + name);
    return *a;
}

Bytes hex_field(const json &j, const char *name) {
    try {
        return from_hex(str_field(j, name));
    } catch (const std::invalid_argument &) {
        throw CodecError(std::string("bad hex in field: ") + name);
    }
}

std::uint16_t port_field(const json &j, const char *name) {
    std::uint64_t v = uint_field(j, name);
    if (v > 65535) throw CodecError(std::string("port out of range: ") + name);
    return static_cast<std::uint16_t>(v);
}

} // namespace

json record_to_json(const ConnectionRecord &rec) {
    return json{{"record_id", rec.record_id},
                {"sensor_id", rec.sensor_id},
                {"src", format_sockaddr(rec.src_addr)},
                {"dst", format_sockaddr(rec.dst_addr)},
                {"service", rec.service_name},
                {"started_at", format_utc(rec.started_at)},
                {"inbound", to_hex(rec.inbound_bytes)},
                {"outbound", to_hex(rec.outbound_bytes)},
                {"dialog_completed", rec.dialog_completed},
                {"truncated", rec.truncated}};
}

ConnectionRecord record_from_json(const json &j) {
    ConnectionRecord rec;
    rec.record_id = str_field(j, "record_id");
    rec.sensor_id = str_field(j, "sensor_id");
    rec.src_addr = addr_field(j, "src");
    rec.dst_addr = addr_field(j, "dst");
    rec.service_name = str_field(j, "service");
    rec.started_at = time_field(j, "started_at");
    rec.inbound_bytes = hex_field(j, "inbound");
    rec.outbound_bytes = hex_field(j, "outbound");
    rec.dialog_completed = bool_field(j, "dialog_completed");
    rec.truncated = bool_field(j, "truncated");
    return rec;
}

json intent_to_json(const DownloadIntent &intent) {
    json j{{"scheme", std::string(scheme_name(intent.scheme))},
           {"host", intent.host},
           {"port", intent.port},
           {"path", intent.path},
           {"via", format_discovered_via(intent.discovered_via)},
           {"source_record", intent.source_record}};
    if (intent.credentials)
        j["credentials"] = json{{"user", intent.credentials->user}, {"password", intent.credentials->password}};
    return j;
}

DownloadIntent intent_from_json(const json &j) {
    DownloadIntent intent;
    auto scheme = parse_scheme(str_field(j, "scheme"));
    if (!scheme) throw CodecError("unknown scheme");
    intent.scheme = *scheme;
    intent.host = str_field(j, "host");
    intent.port = port_field(j, "port");
    intent.path = str_field(j, "path");
    auto via = parse_discovered_via(str_field(j, "via"));
    if (!via) throw CodecError("unknown discovered_via");
    intent.discovered_via = *via;
    intent.source_record = str_field(j, "source_record");
    if (auto it = j.find("credentials"); it != j.end() && !it->is_null()) {
        if (intent.scheme != Scheme::ftp) throw CodecError("credentials on non-ftp intent");
        intent.credentials = Credentials{str_field(*it, "user"), str_field(*it, "password")};
    }
    if (intent.host.empty()) throw CodecError("empty intent host");
    return intent;
}

json capture_to_json(const BinaryCapture &cap) {
    return json{{"md5", cap.md5},
                {"size", cap.size_bytes},
                {"payload", to_hex(cap.payload)},
                {"fetched_from", intent_to_json(cap.fetched_from)},
                {"sensor_id", cap.sensor_id},
                {"fetched_at", format_utc(cap.fetched_at)},
                {"truncated", cap.truncated}};
}

BinaryCapture capture_from_json(const json &j) {
    BinaryCapture cap;
    cap.md5 = str_field(j, "md5");
    if (!is_md5_hex(cap.md5)) throw CodecError("bad md5 field");
    cap.size_bytes = uint_field(j, "size");
    cap.payload = hex_field(j, "payload");
    cap.fetched_from = intent_from_json(field(j, "fetched_from"));
    cap.sensor_id = str_field(j, "sensor_id");
    cap.fetched_at = time_field(j, "fetched_at");
    cap.truncated = bool_field(j, "truncated");
    return cap;
}

json report_to_json(const SensorReport &report) {
    json intents = json::array();
    for (const auto &i : report.intents) intents.push_back(intent_to_json(i));
    json captures = json::array();
    for (const auto &c : report.captures) captures.push_back(capture_to_json(c));
    return json{{"node_id", report.node_id},
                {"event_id", report.event_id},
                {"connection", record_to_json(report.connection)},
                {"intents", intents},
                {"captures", captures},
                {"download_log_lines", report.download_log_lines}};
}

SensorReport report_from_json(const json &j) {
    SensorReport report;
    report.node_id = str_field(j, "node_id");
    report.event_id = str_field(j, "event_id");
    report.connection = record_from_json(field(j, "connection"));
    const json &intents = field(j, "intents");
    if (!intents.is_array()) throw CodecError("intents is not an array");
    for (const auto &i : intents) report.intents.push_back(intent_from_json(i));
    const json &captures = field(j, "captures");
    if (!captures.is_array()) throw CodecError("captures is not an array");
    for (const auto &c : captures) report.captures.push_back(capture_from_json(c));
    const json &lines = field(j, "download_log_lines");
    if (!lines.is_array()) throw CodecError("download_log_lines is not an array");
    for (const auto &l : lines) {
        if (!l.is_string()) throw CodecError("log line is not a string");
        report.download_log_lines.push_back(l.get<std::string>());
    }
    return report;
}

} // namespace nectar
