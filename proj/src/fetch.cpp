#include "nectar/fetch.hpp"

#include <algorithm>
#include <cctype>

#include "nectar/net.hpp"

namespace nectar {

std::string_view fetch_status_name(FetchStatus s) {
    switch (s) {
    case FetchStatus::ok: return "ok";
    case FetchStatus::invalid_target: return "invalid-target";
    case FetchStatus::connect_timeout: return "connect-timeout";
    case FetchStatus::connect_error: return "connect-error";
    case FetchStatus::transfer_timeout: return "transfer-timeout";
    case FetchStatus::protocol_error: return "protocol-error";
    case FetchStatus::empty_body: return "empty-body";
    }
    return "?";
}

namespace {

FetchResult failure(FetchStatus status, std::string detail) {
    FetchResult r;
    r.status = status;
    r.detail = std::move(detail);
    return r;
}

FetchResult success(Bytes body, bool truncated) {
    if (body.empty()) return failure(FetchStatus::empty_body, "0 bytes received");
    FetchResult r;
    r.status = FetchStatus::ok;
    r.body = std::move(body);
    r.truncated = truncated;
    return r;
}

FetchResult connect_failure(const std::string &err) {
    if (err.find("timeout") != std::string::npos) return failure(FetchStatus::connect_timeout, err);
    return failure(FetchStatus::connect_error, err);
}

// Reads until EOF or the cap; returns false on timeout.
bool read_to_close(TcpStream &stream, Bytes &out, std::uint64_t cap, Deadline deadline, bool &truncated) {
    std::uint8_t buf[8192];
    truncated = false;
    while (true) {
        if (out.size() >= cap) {
            truncated = true;
            return true;
        }
        std::size_t want = std::min<std::uint64_t>(sizeof(buf), cap - out.size());
        std::size_t n = 0;
        IoStatus st = stream.read_some(buf, want, deadline, n);
        if (st == IoStatus::ok) {
            out.insert(out.end(), buf, buf + n);
            continue;
        }
        return st == IoStatus::eof;
    }
}

// --------------------------------------------------------------------------
// HTTP: single GET, up to 3 same-scheme redirects, 200 bodies only.

struct HttpResponse {
    int code = 0;
    std::vector<std::pair<std::string, std::string>> headers;
    Bytes leftover; // body bytes already read past the header terminator

    std::optional<std::string> header(std::string_view name) const {
        for (const auto &[k, v] : headers) {
            if (k.size() != name.size()) continue;
            bool eq = true;
            for (std::size_t i = 0; i < k.size(); ++i)
                if (std::tolower(static_cast<unsigned char>(k[i])) !=
                    std::tolower(static_cast<unsigned char>(name[i])))
                    eq = false;
            if (eq) return v;
        }
        return std::nullopt;
    }
};

std::optional<HttpResponse> read_http_header(TcpStream &stream, Deadline deadline) {
    Bytes buf;
    const Bytes terminator = {'\r', '\n', '\r', '\n'};
    while (find_bytes(buf, terminator) == std::string::npos) {
        if (buf.size() > 65536) return std::nullopt;
        std::uint8_t chunk[2048];
        std::size_t n = 0;
        if (stream.read_some(chunk, sizeof(chunk), deadline, n) != IoStatus::ok) return std::nullopt;
        buf.insert(buf.end(), chunk, chunk + n);
    }
    std::size_t end = find_bytes(buf, terminator);
    std::string head = to_string(std::span(buf.data(), end));
    HttpResponse resp;
    resp.leftover.assign(buf.begin() + static_cast<std::ptrdiff_t>(end + 4), buf.end());

    std::size_t line_end = head.find("\r\n");
    std::string status_line = head.substr(0, line_end);
    if (status_line.size() < 12 || status_line.rfind("HTTP/1.", 0) != 0) return std::nullopt;
    resp.code = std::atoi(status_line.c_str() + 9);
    if (resp.code < 100 || resp.code > 599) return std::nullopt;

    std::size_t pos = line_end == std::string::npos ? head.size() : line_end + 2;
    while (pos < head.size()) {
        std::size_t eol = head.find("\r\n", pos);
        if (eol == std::string::npos) eol = head.size();
        std::string line = head.substr(pos, eol - pos);
        pos = eol + 2;
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(0, colon);
        std::string value = line.substr(colon + 1);
        while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.erase(0, 1);
        while (!value.empty() && (value.back() == '\r' || value.back() == ' ')) value.pop_back();
        resp.headers.emplace_back(std::move(key), std::move(value));
    }
    return resp;
}

// Dechunks a Transfer-Encoding: chunked body. Returns nullopt on bad framing.
std::optional<Bytes> read_chunked(TcpStream &stream, Bytes leftover, std::uint64_t cap, Deadline deadline,
                                  bool &truncated) {
    Bytes out;
    truncated = false;
    Bytes buf = std::move(leftover);
    auto fill = [&](std::size_t need) -> bool {
        while (buf.size() < need) {
            std::uint8_t chunk[4096];
            std::size_t n = 0;
            if (stream.read_some(chunk, sizeof(chunk), deadline, n) != IoStatus::ok) return false;
            buf.insert(buf.end(), chunk, chunk + n);
        }
        return true;
    };
    while (true) {
        // size line
        std::size_t eol;
        while ((eol = find_bytes(buf, Bytes{'\r', '\n'})) == std::string::npos) {
            if (buf.size() > 16384) return std::nullopt;
            if (!fill(buf.size() + 1)) return std::nullopt;
        }
        std::string size_line = to_string(std::span(buf.data(), eol));
        buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(eol + 2));
        std::size_t semi = size_line.find(';');
        if (semi != std::string::npos) size_line.resize(semi);
        char *endp = nullptr;
        unsigned long long size = std::strtoull(size_line.c_str(), &endp, 16);
        if (endp == size_line.c_str()) return std::nullopt;
        if (size == 0) {
            return out; // trailers ignored
        }
        if (!fill(size + 2)) return std::nullopt;
        std::uint64_t take = size;
        if (out.size() + take > cap) {
            take = cap - out.size();
            truncated = true;
        }
        out.insert(out.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(take));
        if (truncated) return out;
        buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(size));
        if (buf.size() < 2 || buf[0] != '\r' || buf[1] != '\n') return std::nullopt;
        buf.erase(buf.begin(), buf.begin() + 2);
    }
}

struct HttpTarget {
    std::string host;
    std::uint16_t port;
    std::string path; // with leading '/'
};

// Absolute http:// URL or a path-only redirect target.
std::optional<HttpTarget> parse_redirect(const std::string &location, const HttpTarget &current) {
    if (location.empty()) return std::nullopt;
    if (location[0] == '/') return HttpTarget{current.host, current.port, location};
    if (location.rfind("http://", 0) != 0) return std::nullopt; // cross-scheme refused
    std::string rest = location.substr(7);
    std::string hostport = rest;
    std::string path = "/";
    auto slash = rest.find('/');
    if (slash != std::string::npos) {
        hostport = rest.substr(0, slash);
        path = rest.substr(slash);
    }
    std::string host = hostport;
    std::uint16_t port = 80;
    auto colon = hostport.rfind(':');
    if (colon != std::string::npos) {
        host = hostport.substr(0, colon);
        int p = std::atoi(hostport.c_str() + colon + 1);
        if (p < 1 || p > 65535) return std::nullopt;
        port = static_cast<std::uint16_t>(p);
    }
    if (host.empty()) return std::nullopt;
    return HttpTarget{host, port, path};
}

} // namespace

FetchResult fetch_http(const DownloadIntent &intent, const FetchOptions &opts) {
    HttpTarget target{intent.host, intent.port, "/" + intent.path};
    for (int hop = 0; hop <= opts.http_max_redirects; ++hop) {
        std::string err;
        auto stream = TcpStream::connect(target.host, target.port, opts.connect_timeout, &err);
        if (!stream) return connect_failure(err);
        Deadline deadline = Deadline::in(opts.transfer_timeout);

        std::string request = "GET " + target.path + " HTTP/1.1\r\nHost: " + target.host +
                              (target.port != 80 ? ":" + std::to_string(target.port) : "") +
                              "\r\nUser-Agent: nectar-fetch/1.0\r\nAccept: */*\r\nConnection: close\r\n\r\n";
        if (!stream->write_all(request, deadline))
            return failure(FetchStatus::transfer_timeout, "request write failed");

        auto resp = read_http_header(*stream, deadline);
        if (!resp) {
            if (deadline.expired()) return failure(FetchStatus::transfer_timeout, "header read timed out");
            return failure(FetchStatus::protocol_error, "malformed response header");
        }

        if (resp->code == 301 || resp->code == 302 || resp->code == 303 || resp->code == 307 ||
            resp->code == 308) {
            auto loc = resp->header("location");
            if (!loc) return failure(FetchStatus::protocol_error, "redirect without Location");
            auto next = parse_redirect(*loc, target);
            if (!next) return failure(FetchStatus::protocol_error, "unsupported redirect target: " + *loc);
            target = *next;
            continue;
        }
        if (resp->code != 200)
            return failure(FetchStatus::protocol_error, "http status " + std::to_string(resp->code));

        auto te = resp->header("transfer-encoding");
        if (te && te->find("chunked") != std::string::npos) {
            bool truncated = false;
            auto body = read_chunked(*stream, std::move(resp->leftover), opts.fetch_cap, deadline, truncated);
            if (!body) {
                if (deadline.expired()) return failure(FetchStatus::transfer_timeout, "chunked read timed out");
                return failure(FetchStatus::protocol_error, "bad chunked framing");
            }
            return success(std::move(*body), truncated);
        }

        Bytes body = std::move(resp->leftover);
        auto cl = resp->header("content-length");
        if (cl) {
            char *endp = nullptr;
            unsigned long long want = std::strtoull(cl->c_str(), &endp, 10);
            if (endp == cl->c_str()) return failure(FetchStatus::protocol_error, "bad Content-Length");
            bool truncated = false;
            std::uint64_t limit = std::min<std::uint64_t>(want, opts.fetch_cap);
            if (want > opts.fetch_cap) truncated = true;
            if (body.size() > limit) body.resize(limit);
            std::uint8_t buf[8192];
            while (body.size() < limit) {
                std::size_t want_now = std::min<std::uint64_t>(sizeof(buf), limit - body.size());
                std::size_t n = 0;
                IoStatus st = stream->read_some(buf, want_now, deadline, n);
                if (st == IoStatus::timeout) return failure(FetchStatus::transfer_timeout, "body read timed out");
                if (st != IoStatus::ok)
                    return failure(FetchStatus::protocol_error,
                                   "short body: got " + std::to_string(body.size()) + " of " + *cl);
                body.insert(body.end(), buf, buf + n);
            }
            return success(std::move(body), truncated);
        }

        bool truncated = false;
        if (!read_to_close(*stream, body, opts.fetch_cap, deadline, truncated))
            return failure(FetchStatus::transfer_timeout, "body read timed out");
        return success(std::move(body), truncated);
    }
    return failure(FetchStatus::protocol_error,
                   "too many redirects (> " + std::to_string(opts.http_max_redirects) + ")");
}

// --------------------------------------------------------------------------
// FTP: RFC 959 subset — USER/PASS, TYPE I, PASV, RETR.

namespace {

struct FtpReply {
    int code = 0;
    std::string text;
};

// Reads one (possibly multi-line) control reply.
std::optional<FtpReply> read_ftp_reply(TcpStream &ctrl, Bytes &buf, Deadline deadline) {
    auto take_line = [&](std::string &line) -> bool {
        while (true) {
            std::size_t eol = find_bytes(buf, Bytes{'\r', '\n'});
            if (eol != std::string::npos) {
                line = to_string(std::span(buf.data(), eol));
                buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(eol + 2));
                return true;
            }
            if (buf.size() > 16384) return false;
            std::uint8_t chunk[1024];
            std::size_t n = 0;
            if (ctrl.read_some(chunk, sizeof(chunk), deadline, n) != IoStatus::ok) return false;
            buf.insert(buf.end(), chunk, chunk + n);
        }
    };
    std::string line;
    if (!take_line(line)) return std::nullopt;
    if (line.size() < 4 || !std::isdigit(static_cast<unsigned char>(line[0]))) return std::nullopt;
    FtpReply reply;
    reply.code = std::atoi(line.substr(0, 3).c_str());
    reply.text = line;
    if (line[3] == '-') { // multi-line: read until "NNN " line
        std::string terminator = line.substr(0, 3) + " ";
        while (true) {
            if (!take_line(line)) return std::nullopt;
            reply.text += "\n" + line;
            if (line.rfind(terminator, 0) == 0) break;
        }
    }
    return reply;
}

bool send_ftp(TcpStream &ctrl, const std::string &cmd, Deadline deadline) {
    return ctrl.write_all(cmd + "\r\n", deadline);
}

} // namespace

FetchResult fetch_ftp(const DownloadIntent &intent, const FetchOptions &opts) {
    std::string err;
    auto ctrl = TcpStream::connect(intent.host, intent.port, opts.connect_timeout, &err);
    if (!ctrl) return connect_failure(err);
    Deadline deadline = Deadline::in(opts.transfer_timeout);
    Bytes ctrl_buf;

    auto expect = [&](std::initializer_list<int> codes, const char *what) -> std::optional<FetchResult> {
        auto reply = read_ftp_reply(*ctrl, ctrl_buf, deadline);
        if (!reply) {
            if (deadline.expired())
                return failure(FetchStatus::transfer_timeout, std::string(what) + " timed out");
            return failure(FetchStatus::protocol_error, std::string(what) + ": malformed reply");
        }
        for (int c : codes)
            if (reply->code == c) return std::nullopt;
        return failure(FetchStatus::protocol_error, std::string(what) + ": " + reply->text);
    };

    if (auto f = expect({220}, "greeting")) return *f;
    std::string user = intent.credentials ? intent.credentials->user : "anonymous";
    std::string pass = intent.credentials ? intent.credentials->password : "anonymous@";
    if (!send_ftp(*ctrl, "USER " + user, deadline)) return failure(FetchStatus::transfer_timeout, "USER");
    {
        auto reply = read_ftp_reply(*ctrl, ctrl_buf, deadline);
        if (!reply) return failure(FetchStatus::protocol_error, "USER: malformed reply");
        if (reply->code == 331) {
            if (!send_ftp(*ctrl, "PASS " + pass, deadline))
                return failure(FetchStatus::transfer_timeout, "PASS");
            if (auto f = expect({230}, "PASS")) return *f;
        } else if (reply->code != 230) {
            return failure(FetchStatus::protocol_error, "USER: " + reply->text);
        }
    }
    if (!send_ftp(*ctrl, "TYPE I", deadline)) return failure(FetchStatus::transfer_timeout, "TYPE");
    if (auto f = expect({200}, "TYPE I")) return *f;

    if (!send_ftp(*ctrl, "PASV", deadline)) return failure(FetchStatus::transfer_timeout, "PASV");
    auto pasv = read_ftp_reply(*ctrl, ctrl_buf, deadline);
    if (!pasv || pasv->code != 227)
        return failure(FetchStatus::protocol_error, "PASV: " + (pasv ? pasv->text : "no reply"));
    auto open = pasv->text.find('(');
    auto close = pasv->text.find(')', open);
    if (open == std::string::npos || close == std::string::npos)
        return failure(FetchStatus::protocol_error, "PASV: missing host/port tuple");
    unsigned h1, h2, h3, h4, p1, p2;
    if (std::sscanf(pasv->text.c_str() + open + 1, "%u,%u,%u,%u,%u,%u", &h1, &h2, &h3, &h4, &p1, &p2) != 6 ||
        h1 > 255 || h2 > 255 || h3 > 255 || h4 > 255 || p1 > 255 || p2 > 255)
        return failure(FetchStatus::protocol_error, "PASV: bad tuple");
    std::string data_host = std::to_string(h1) + "." + std::to_string(h2) + "." + std::to_string(h3) + "." +
                            std::to_string(h4);
    std::uint16_t data_port = static_cast<std::uint16_t>(p1 * 256 + p2);

    auto data = TcpStream::connect(data_host, data_port, opts.connect_timeout, &err);
    if (!data) return connect_failure("data connection: " + err);

    if (!send_ftp(*ctrl, "RETR " + intent.path, deadline)) return failure(FetchStatus::transfer_timeout, "RETR");
    {
        auto reply = read_ftp_reply(*ctrl, ctrl_buf, deadline);
        if (!reply) return failure(FetchStatus::protocol_error, "RETR: malformed reply");
        if (reply->code != 150 && reply->code != 125)
            return failure(FetchStatus::protocol_error, "RETR: " + reply->text);
    }

    Bytes body;
    bool truncated = false;
    if (!read_to_close(*data, body, opts.fetch_cap, deadline, truncated))
        return failure(FetchStatus::transfer_timeout, "data read timed out");
    data->close();

    if (!truncated) {
        auto done = read_ftp_reply(*ctrl, ctrl_buf, deadline);
        if (!done) return failure(FetchStatus::protocol_error, "transfer status: malformed reply");
        if (done->code != 226 && done->code != 250)
            return failure(FetchStatus::protocol_error, "transfer failed: " + done->text);
    }
    send_ftp(*ctrl, "QUIT", Deadline::in_ms(500));
    return success(std::move(body), truncated);
}

// --------------------------------------------------------------------------
// TFTP: RFC 1350 subset — RRQ octet, lockstep DATA/ACK, 512-byte blocks.

namespace {

Bytes tftp_rrq(const std::string &filename) {
    Bytes pkt = {0, 1};
    for (char c : filename) pkt.push_back(static_cast<std::uint8_t>(c));
    pkt.push_back(0);
    for (char c : std::string_view("octet")) pkt.push_back(static_cast<std::uint8_t>(c));
    pkt.push_back(0);
    return pkt;
}

Bytes tftp_ack(std::uint16_t block) {
    return {0, 4, static_cast<std::uint8_t>(block >> 8), static_cast<std::uint8_t>(block & 0xff)};
}

} // namespace

FetchResult fetch_tftp(const DownloadIntent &intent, const FetchOptions &opts) {
    auto server_ip = resolve_ipv4(intent.host);
    if (!server_ip) return failure(FetchStatus::invalid_target, "cannot resolve " + intent.host);
    UdpSocket sock;
    try {
        sock = UdpSocket::bind(Ipv4::any(), 0);
    } catch (const std::exception &e) {
        return failure(FetchStatus::connect_error, e.what());
    }

    Deadline overall = Deadline::in(opts.transfer_timeout);
    SockAddr server{*server_ip, intent.port};
    std::optional<std::uint16_t> transfer_port; // server picks a fresh TID for the transfer
    Bytes last_sent = tftp_rrq(intent.path);
    if (!sock.send_to(last_sent, server)) return failure(FetchStatus::connect_error, "RRQ send failed");

    Bytes body;
    bool truncated = false;
    std::uint16_t expected_block = 1;
    int tries_left = opts.tftp_tries;

    while (true) {
        if (overall.expired()) return failure(FetchStatus::transfer_timeout, "transfer deadline exceeded");
        Bytes pkt;
        SockAddr from;
        Deadline per_try = Deadline::in(opts.tftp_retransmit);
        IoStatus st = sock.recv_from(pkt, from, per_try.at < overall.at ? per_try : overall);
        if (st == IoStatus::timeout) {
            if (--tries_left <= 0)
                return failure(FetchStatus::transfer_timeout,
                               "no DATA for block " + std::to_string(expected_block));
            SockAddr to = server;
            if (transfer_port) to.port = *transfer_port;
            sock.send_to(last_sent, to); // retransmit RRQ or last ACK
            continue;
        }
        if (st != IoStatus::ok) return failure(FetchStatus::connect_error, "udp receive failed");
        if (from.ip != *server_ip) continue;               // stray packet
        if (transfer_port && from.port != *transfer_port) continue; // wrong TID
        if (pkt.size() < 4) continue;

        std::uint16_t opcode = static_cast<std::uint16_t>(pkt[0] << 8 | pkt[1]);
        if (opcode == 5) { // ERROR
            std::string msg(pkt.begin() + 4, pkt.end());
            return failure(FetchStatus::protocol_error, "tftp error: " + msg);
        }
        if (opcode != 3) continue; // only DATA matters to a reading client
        if (!transfer_port) transfer_port = from.port;
        std::uint16_t block = static_cast<std::uint16_t>(pkt[2] << 8 | pkt[3]);
        SockAddr to{*server_ip, *transfer_port};

        if (block == expected_block) {
            std::size_t data_len = pkt.size() - 4;
            std::uint64_t room = opts.fetch_cap - body.size();
            if (data_len > room) {
                data_len = static_cast<std::size_t>(room);
                truncated = true;
            }
            body.insert(body.end(), pkt.begin() + 4, pkt.begin() + 4 + static_cast<std::ptrdiff_t>(data_len));
            last_sent = tftp_ack(block);
            sock.send_to(last_sent, to);
            if (truncated || pkt.size() - 4 < 512) return success(std::move(body), truncated);
            ++expected_block;
            tries_left = opts.tftp_tries;
        } else if (block == static_cast<std::uint16_t>(expected_block - 1)) {
            // duplicate DATA (our ACK was lost): re-ACK, do not append
            sock.send_to(tftp_ack(block), to);
        }
        // other blocks: ignore
    }
}

// --------------------------------------------------------------------------
// creceive: connect and read until the peer closes.

FetchResult fetch_creceive(const DownloadIntent &intent, const FetchOptions &opts) {
    std::string err;
    auto stream = TcpStream::connect(intent.host, intent.port, opts.connect_timeout, &err);
    if (!stream) return connect_failure(err);
    Bytes body;
    bool truncated = false;
    if (!read_to_close(*stream, body, opts.fetch_cap, Deadline::in(opts.transfer_timeout), truncated))
        return failure(FetchStatus::transfer_timeout, "read timed out");
    return success(std::move(body), truncated);
}

// --------------------------------------------------------------------------

FetchResult fetch(const DownloadIntent &intent, const FetchOptions &opts, const FetchLog &log) {
    FetchResult result;
    if (intent.host.empty() || intent.host == "0.0.0.0" || intent.port == 0) {
        result = failure(FetchStatus::invalid_target, "unroutable target " + intent.host + ":" +
                                                          std::to_string(intent.port));
    } else {
        switch (intent.scheme) {
        case Scheme::http: result = fetch_http(intent, opts); break;
        case Scheme::ftp: result = fetch_ftp(intent, opts); break;
        case Scheme::tftp: result = fetch_tftp(intent, opts); break;
        case Scheme::creceive: result = fetch_creceive(intent, opts); break;
        }
    }
    if (log.sink) {
        DownloadLogEntry entry;
        entry.timestamp = log.clock ? log.clock() : now_utc();
        entry.src_ip = log.src_ip;
        entry.dst_ip = log.dst_ip;
        entry.url = intent.url_text();
        log.sink(entry);
    }
    return result;
}

} // namespace nectar
