#include "nectar/service_profile.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace nectar {

void EmulatedService::validate() const {
    if (name.empty()) throw ConfigError("service name must be non-empty");
    if (port == 0) throw ConfigError("service '" + name + "': port must be 1..65535");
    if (dialog.empty() && capture.kind != CaptureMode::Kind::until_close)
        throw ConfigError("service '" + name + "': empty dialog requires capture until_close");
    for (const auto &step : dialog)
        if (step.kind == DialogStep::Kind::expect && step.payload.empty())
            throw ConfigError("service '" + name + "': expect pattern must be non-empty");
    if (capture.kind == CaptureMode::Kind::after_trigger && capture.trigger.empty())
        throw ConfigError("service '" + name + "': after_trigger pattern must be non-empty");
}

EmulatedService parse_service_block(TokenStream &ts) {
    ts.expect_word("service");
    EmulatedService svc;
    svc.name = ts.expect_any_word("service name");
    ts.expect(Token::Kind::lbrace, "'{'");
    while (ts.peek().kind != Token::Kind::rbrace) {
        if (ts.accept_word("port")) {
            std::int64_t p = ts.expect_int("port");
            if (p < 1 || p > 65535) ts.fail("port must be 1..65535");
            svc.port = static_cast<std::uint16_t>(p);
        } else if (ts.accept_word("dialog")) {
            ts.expect(Token::Kind::lbrace, "'{'");
            while (ts.peek().kind != Token::Kind::rbrace) {
                DialogStep step;
                if (ts.accept_word("send")) {
                    step.kind = DialogStep::Kind::send;
                    step.payload = ts.expect_string_bytes("send payload");
                    step.timeout_s = 0;
                } else if (ts.accept_word("expect")) {
                    step.kind = DialogStep::Kind::expect;
                    step.payload = ts.expect_string_bytes("expect pattern");
                    ts.expect_word("timeout");
                    step.timeout_s = ts.expect_number("timeout seconds");
                    if (step.timeout_s <= 0) ts.fail("expect timeout must be positive");
                } else {
                    ts.fail("expected 'send' or 'expect' in dialog");
                }
                svc.dialog.push_back(std::move(step));
            }
            ts.expect(Token::Kind::rbrace, "'}'");
        } else if (ts.accept_word("capture")) {
            if (ts.accept_word("until_close")) {
                svc.capture = CaptureMode::until_close();
            } else if (ts.accept_word("fixed_length")) {
                std::int64_t n = ts.expect_int("fixed_length bytes");
                if (n < 0) ts.fail("fixed_length must be non-negative");
                svc.capture = CaptureMode::fixed_length(static_cast<std::uint64_t>(n));
            } else if (ts.accept_word("after_trigger")) {
                svc.capture = CaptureMode::after_trigger(ts.expect_string_bytes("trigger pattern"));
            } else {
                ts.fail("expected until_close, fixed_length or after_trigger");
            }
        } else if (ts.accept_word("connectback")) {
            ConnectbackSlot slot;
            ts.expect_word("ip_offset");
            std::int64_t ip_off = ts.expect_int("ip_offset");
            ts.expect_word("port_offset");
            std::int64_t port_off = ts.expect_int("port_offset");
            if (ip_off < 0 || port_off < 0) ts.fail("offsets must be non-negative");
            slot.ip_offset = static_cast<std::uint64_t>(ip_off);
            slot.port_offset = static_cast<std::uint64_t>(port_off);
            svc.connectback = slot;
        } else {
            ts.fail("unknown service item '" + ts.peek().text + "'");
        }
    }
    ts.expect(Token::Kind::rbrace, "'}'");
    svc.validate();
    return svc;
}

std::vector<EmulatedService> parse_service_profiles(std::string_view text) {
    TokenStream ts(text);
    std::vector<EmulatedService> out;
    std::set<std::uint16_t> ports;
    while (!ts.at_end()) {
        EmulatedService svc = parse_service_block(ts);
        if (!ports.insert(svc.port).second)
            throw ConfigError("duplicate port " + std::to_string(svc.port) + " in service '" + svc.name +
                              "'");
        out.push_back(std::move(svc));
    }
    return out;
}

std::vector<EmulatedService> load_service_profiles(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open profile file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_service_profiles(buf.str());
}

static std::string format_timeout(double t) {
    // Integral timeouts print without a decimal point so files stay tidy.
    if (t == static_cast<double>(static_cast<std::int64_t>(t)))
        return std::to_string(static_cast<std::int64_t>(t));
    std::ostringstream os;
    os << t;
    return os.str();
}

std::string serialize_service(const EmulatedService &svc) {
    std::ostringstream os;
    os << "service " << svc.name << " {\n";
    os << "  port " << svc.port << "\n";
    if (!svc.dialog.empty()) {
        os << "  dialog {\n";
        for (const auto &step : svc.dialog) {
            if (step.kind == DialogStep::Kind::send)
                os << "    send " << quote_config_string(step.payload) << "\n";
            else
                os << "    expect " << quote_config_string(step.payload) << " timeout "
                   << format_timeout(step.timeout_s) << "\n";
        }
        os << "  }\n";
    }
    switch (svc.capture.kind) {
    case CaptureMode::Kind::until_close: os << "  capture until_close\n"; break;
    case CaptureMode::Kind::fixed_length: os << "  capture fixed_length " << svc.capture.length << "\n"; break;
    case CaptureMode::Kind::after_trigger:
        os << "  capture after_trigger " << quote_config_string(svc.capture.trigger) << "\n";
        break;
    }
    if (svc.connectback)
        os << "  connectback ip_offset " << svc.connectback->ip_offset << " port_offset "
           << svc.connectback->port_offset << "\n";
    os << "}\n";
    return os.str();
}

std::string serialize_service_profiles(const std::vector<EmulatedService> &services) {
    std::string out;
    for (const auto &svc : services) {
        if (!out.empty()) out += "\n";
        out += serialize_service(svc);
    }
    return out;
}

} // namespace nectar
