#include "nectar/harness_servers.hpp"

#include <atomic>
#include <sstream>
#include <thread>
#include <vector>

#include "nectar/log.hpp"
#include "nectar/net.hpp"

namespace nectar::harness {

namespace {

constexpr auto kIoTimeout = std::chrono::milliseconds(10000);

// Joins per-connection workers on shutdown.
class WorkerPool {
  public:
    ~WorkerPool() { join_all(); }

    template <typename F> void spawn(F &&f) {
        std::lock_guard lock(mu_);
        workers_.emplace_back(std::forward<F>(f));
    }

    void join_all() {
        std::vector<std::jthread> taken;
        {
            std::lock_guard lock(mu_);
            taken.swap(workers_);
        }
        taken.clear();
    }

  private:
    std::mutex mu_;
    std::vector<std::jthread> workers_;
};

class TcpServerBase : public PayloadServer {
  public:
    explicit TcpServerBase(PayloadServerConfig config)
        : config_(std::move(config)), listener_(TcpListener::bind(Ipv4::loopback(), config_.port)) {}

    ~TcpServerBase() override { stop(); }

    std::uint16_t port() const override { return listener_.port(); }

    void start() {
        accept_thread_ = std::jthread([this](std::stop_token stop) {
            while (!stop.stop_requested()) {
                auto conn = listener_.accept(Deadline::never(), stop);
                if (!conn) continue;
                auto shared = std::make_shared<TcpStream>(std::move(*conn));
                workers_.spawn([this, shared](std::stop_token) { handle(*shared); });
            }
        });
    }

    void stop() override {
        if (accept_thread_.joinable()) {
            accept_thread_.request_stop();
            accept_thread_.join();
        }
        listener_.close();
        workers_.join_all();
    }

  protected:
    virtual void handle(TcpStream &conn) = 0;

    PayloadServerConfig config_;

  private:
    TcpListener listener_;
    std::jthread accept_thread_;
    WorkerPool workers_;
};

// --------------------------------------------------------------------------

class HttpPayloadServer final : public TcpServerBase {
  public:
    using TcpServerBase::TcpServerBase;

  private:
    void handle(TcpStream &conn) override {
        Bytes buf;
        Deadline deadline = Deadline::in(kIoTimeout);
        while (find_bytes(buf, to_bytes("\r\n\r\n")) == std::string::npos) {
            if (buf.size() > 16384) return;
            std::uint8_t chunk[2048];
            std::size_t n = 0;
            if (conn.read_some(chunk, sizeof(chunk), deadline, n) != IoStatus::ok) return;
            buf.insert(buf.end(), chunk, chunk + n);
        }
        std::string head = to_string(buf);
        std::istringstream first(head.substr(0, head.find("\r\n")));
        std::string method, target, version;
        first >> method >> target >> version;
        if (method != "GET") {
            conn.write_all("HTTP/1.1 501 Not Implemented\r\nContent-Length: 0\r\nConnection: close\r\n\r\n",
                           deadline);
            return;
        }
        std::string path = target;
        if (!path.empty() && path[0] == '/') path.erase(0, 1);

        if (auto it = config_.http_redirects.find(path); it != config_.http_redirects.end()) {
            conn.write_all("HTTP/1.1 302 Found\r\nLocation: " + it->second +
                               "\r\nContent-Length: 0\r\nConnection: close\r\n\r\n",
                           deadline);
            return;
        }
        auto it = config_.files.find(path);
        if (it == config_.files.end()) {
            conn.write_all("HTTP/1.1 404 Not Found\r\nContent-Length: 9\r\nConnection: close\r\n\r\nnot found",
                           deadline);
            return;
        }
        const Bytes &body = it->second;
        conn.write_all("HTTP/1.1 200 OK\r\nContent-Type: application/octet-stream\r\nContent-Length: " +
                           std::to_string(body.size()) + "\r\nConnection: close\r\n\r\n",
                       deadline);
        serve_body(conn, body, deadline);
    }

    void serve_body(TcpStream &conn, const Bytes &body, Deadline deadline) {
        const auto &mis = config_.misbehavior;
        if (mis.kind == Misbehavior::Kind::close_early) {
            std::size_t n = std::min<std::uint64_t>(mis.close_after, body.size());
            conn.write_all(std::span(body.data(), n), deadline);
            return; // connection closes with the body short of Content-Length
        }
        if (mis.kind == Misbehavior::Kind::slow) {
            for (std::size_t off = 0; off < body.size(); off += 512) {
                std::size_t n = std::min<std::size_t>(512, body.size() - off);
                if (!conn.write_all(std::span(body.data() + off, n), deadline)) return;
                std::this_thread::sleep_for(mis.delay);
            }
            return;
        }
        conn.write_all(body, deadline);
    }
};

// --------------------------------------------------------------------------

class FtpPayloadServer final : public TcpServerBase {
  public:
    using TcpServerBase::TcpServerBase;

  private:
    void handle(TcpStream &conn) override {
        Deadline deadline = Deadline::in(kIoTimeout);
        conn.write_all("220 harness ftp ready\r\n", deadline);
        Bytes buf;
        std::optional<TcpListener> pasv;
        while (true) {
            std::size_t eol;
            while ((eol = find_bytes(buf, to_bytes("\r\n"))) == std::string::npos) {
                if (buf.size() > 4096) return;
                std::uint8_t chunk[512];
                std::size_t n = 0;
                if (conn.read_some(chunk, sizeof(chunk), deadline, n) != IoStatus::ok) return;
                buf.insert(buf.end(), chunk, chunk + n);
            }
            std::string line = to_string(std::span(buf.data(), eol));
            buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(eol + 2));
            std::string cmd = line.substr(0, line.find(' '));
            for (auto &c : cmd) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            std::string arg = line.size() > cmd.size() ? line.substr(cmd.size() + 1) : "";

            if (cmd == "USER") {
                conn.write_all("331 password required\r\n", deadline);
            } else if (cmd == "PASS") {
                conn.write_all("230 login ok\r\n", deadline);
            } else if (cmd == "TYPE") {
                conn.write_all("200 type set\r\n", deadline);
            } else if (cmd == "PASV") {
                pasv = TcpListener::bind(Ipv4::loopback(), 0);
                std::uint16_t p = pasv->port();
                conn.write_all("227 Entering Passive Mode (127,0,0,1," + std::to_string(p / 256) + "," +
                                   std::to_string(p % 256) + ")\r\n",
                               deadline);
            } else if (cmd == "RETR") {
                if (!pasv) {
                    conn.write_all("425 use PASV first\r\n", deadline);
                    continue;
                }
                auto it = config_.files.find(arg);
                if (it == config_.files.end()) {
                    conn.write_all("550 " + arg + ": not found\r\n", deadline);
                    continue;
                }
                conn.write_all("150 opening binary connection\r\n", deadline);
                auto data = pasv->accept(Deadline::in(kIoTimeout));
                pasv.reset();
                if (!data) {
                    conn.write_all("425 no data connection\r\n", deadline);
                    continue;
                }
                bool complete = serve_data(*data, it->second, deadline);
                data->close();
                conn.write_all(complete ? "226 transfer complete\r\n" : "426 transfer aborted\r\n", deadline);
            } else if (cmd == "QUIT") {
                conn.write_all("221 bye\r\n", deadline);
                return;
            } else {
                conn.write_all("502 not implemented\r\n", deadline);
            }
        }
    }

    bool serve_data(TcpStream &data, const Bytes &body, Deadline deadline) {
        const auto &mis = config_.misbehavior;
        if (mis.kind == Misbehavior::Kind::close_early) {
            std::size_t n = std::min<std::uint64_t>(mis.close_after, body.size());
            data.write_all(std::span(body.data(), n), deadline);
            return false;
        }
        if (mis.kind == Misbehavior::Kind::slow) {
            for (std::size_t off = 0; off < body.size(); off += 512) {
                std::size_t n = std::min<std::size_t>(512, body.size() - off);
                if (!data.write_all(std::span(body.data() + off, n), deadline)) return false;
                std::this_thread::sleep_for(mis.delay);
            }
            return true;
        }
        return data.write_all(body, deadline);
    }
};

// --------------------------------------------------------------------------

class CreceivePayloadServer final : public TcpServerBase {
  public:
    using TcpServerBase::TcpServerBase;

  private:
    void handle(TcpStream &conn) override {
        if (config_.files.empty()) return;
        const Bytes &body = config_.files.begin()->second; // pusher has no request phase
        Deadline deadline = Deadline::in(kIoTimeout);
        const auto &mis = config_.misbehavior;
        if (mis.kind == Misbehavior::Kind::close_early) {
            std::size_t n = std::min<std::uint64_t>(mis.close_after, body.size());
            conn.write_all(std::span(body.data(), n), deadline);
            return;
        }
        if (mis.kind == Misbehavior::Kind::slow) {
            for (std::size_t off = 0; off < body.size(); off += 512) {
                std::size_t n = std::min<std::size_t>(512, body.size() - off);
                if (!conn.write_all(std::span(body.data() + off, n), deadline)) return;
                std::this_thread::sleep_for(mis.delay);
            }
            return;
        }
        conn.write_all(body, deadline);
    }
};

// --------------------------------------------------------------------------

class TftpPayloadServer final : public PayloadServer {
  public:
    explicit TftpPayloadServer(PayloadServerConfig config)
        : config_(std::move(config)), sock_(UdpSocket::bind(Ipv4::loopback(), config_.port)) {}

    ~TftpPayloadServer() override { stop(); }

    std::uint16_t port() const override { return sock_.port(); }
    std::uint64_t data_packets_sent() const override { return data_packets_; }

    void start() {
        main_thread_ = std::jthread([this](std::stop_token stop) {
            while (!stop.stop_requested()) {
                Bytes pkt;
                SockAddr from;
                IoStatus st = sock_.recv_from(pkt, from, Deadline::in_ms(100));
                if (st == IoStatus::timeout) continue;
                if (st != IoStatus::ok) return;
                if (pkt.size() < 4 || pkt[0] != 0 || pkt[1] != 1) continue; // RRQ only
                auto nul = find_bytes(std::span(pkt).subspan(2), Bytes{0});
                if (nul == std::string::npos) continue;
                std::string filename = to_string(std::span(pkt.data() + 2, nul));
                workers_.spawn([this, filename, from](std::stop_token transfer_stop) {
                    run_transfer(filename, from, transfer_stop);
                });
            }
        });
    }

    void stop() override {
        if (main_thread_.joinable()) {
            main_thread_.request_stop();
            main_thread_.join();
        }
        workers_.join_all();
    }

  private:
    void run_transfer(const std::string &filename, SockAddr client, std::stop_token stop) {
        UdpSocket tsock = UdpSocket::bind(Ipv4::loopback(), 0); // fresh TID per RFC 1350
        auto it = config_.files.find(filename);
        if (it == config_.files.end()) {
            Bytes err = {0, 5, 0, 1};
            for (char c : std::string_view("file not found")) err.push_back(static_cast<std::uint8_t>(c));
            err.push_back(0);
            tsock.send_to(err, client);
            return;
        }
        const Bytes &body = it->second;
        const auto &mis = config_.misbehavior;
        std::uint64_t nblocks = body.size() / 512 + 1; // final short (possibly empty) block ends transfer
        for (std::uint64_t i = 0; i < nblocks && !stop.stop_requested(); ++i) {
            std::uint16_t block = static_cast<std::uint16_t>(i + 1);
            std::size_t off = static_cast<std::size_t>(i) * 512;
            std::size_t len = std::min<std::size_t>(512, body.size() - off);
            Bytes pkt = {0, 3, static_cast<std::uint8_t>(block >> 8), static_cast<std::uint8_t>(block & 0xff)};
            pkt.insert(pkt.end(), body.begin() + static_cast<std::ptrdiff_t>(off),
                       body.begin() + static_cast<std::ptrdiff_t>(off + len));
            if (mis.kind == Misbehavior::Kind::slow) std::this_thread::sleep_for(mis.delay);

            int sends = mis.kind == Misbehavior::Kind::duplicate_block ? 2 : 1;
            bool acked = false;
            for (int attempt = 0; attempt < 3 && !acked && !stop.stop_requested(); ++attempt) {
                for (int s = 0; s < sends; ++s) {
                    tsock.send_to(pkt, client);
                    ++data_packets_;
                }
                Deadline wait = Deadline::in_ms(1000);
                while (!acked) {
                    Bytes reply;
                    SockAddr from;
                    IoStatus st = tsock.recv_from(reply, from, wait);
                    if (st != IoStatus::ok) break; // timeout: retransmit
                    if (from != client || reply.size() < 4 || reply[0] != 0 || reply[1] != 4) continue;
                    std::uint16_t acked_block = static_cast<std::uint16_t>(reply[2] << 8 | reply[3]);
                    if (acked_block == block) acked = true;
                    // stale ACKs ignored (avoids the Sorcerer's Apprentice loop)
                }
            }
            if (!acked) return;
        }
    }

    PayloadServerConfig config_;
    UdpSocket sock_;
    std::jthread main_thread_;
    WorkerPool workers_;
    std::atomic<std::uint64_t> data_packets_{0};
};

} // namespace

std::unique_ptr<PayloadServer> serve_payload(PayloadServerConfig config) {
    switch (config.scheme) {
    case Scheme::http: {
        auto s = std::make_unique<HttpPayloadServer>(std::move(config));
        s->start();
        return s;
    }
    case Scheme::ftp: {
        auto s = std::make_unique<FtpPayloadServer>(std::move(config));
        s->start();
        return s;
    }
    case Scheme::creceive: {
        auto s = std::make_unique<CreceivePayloadServer>(std::move(config));
        s->start();
        return s;
    }
    case Scheme::tftp: {
        auto s = std::make_unique<TftpPayloadServer>(std::move(config));
        s->start();
        return s;
    }
    }
    throw std::runtime_error("unknown payload server scheme");
}

} // namespace nectar::harness
