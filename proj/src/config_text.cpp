#include "nectar/config_text.hpp"

#include <cctype>
#include <cstdio>

namespace nectar {

static bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == ':' ||
           c == '/';
}

static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

TokenStream::TokenStream(std::string_view input) {
    int line = 1;
    std::size_t i = 0;
    while (i < input.size()) {
        char c = input[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < input.size() && input[i] != '\n') ++i;
            continue;
        }
        if (c == '{') {
            tokens_.push_back({Token::Kind::lbrace, "{", line});
            ++i;
            continue;
        }
        if (c == '}') {
            tokens_.push_back({Token::Kind::rbrace, "}", line});
            ++i;
            continue;
        }
        if (c == '"') {
            std::string out;
            ++i;
            bool closed = false;
            while (i < input.size()) {
                char d = input[i];
                if (d == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\') {
                    if (i + 1 >= input.size())
                        throw ConfigError("line " + std::to_string(line) + ": dangling escape");
                    char e = input[i + 1];
                    i += 2;
                    switch (e) {
                    case '\\': out.push_back('\\'); break;
                    case '"': out.push_back('"'); break;
                    case 'r': out.push_back('\r'); break;
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case '0': out.push_back('\0'); break;
                    case 'x': {
                        if (i + 1 >= input.size())
                            throw ConfigError("line " + std::to_string(line) + ": truncated \\x escape");
                        int hi = hex_digit(input[i]), lo = hex_digit(input[i + 1]);
                        if (hi < 0 || lo < 0)
                            throw ConfigError("line " + std::to_string(line) + ": bad \\x escape");
                        out.push_back(static_cast<char>(hi << 4 | lo));
                        i += 2;
                        break;
                    }
                    default:
                        throw ConfigError("line " + std::to_string(line) + ": unknown escape \\" +
                                          std::string(1, e));
                    }
                    continue;
                }
                out.push_back(d);
                ++i;
            }
            if (!closed) throw ConfigError("line " + std::to_string(line) + ": unterminated string");
            tokens_.push_back({Token::Kind::string, out, line});
            continue;
        }
        if (is_word_char(c)) {
            std::size_t start = i;
            while (i < input.size() && is_word_char(input[i])) ++i;
            tokens_.push_back({Token::Kind::word, std::string(input.substr(start, i - start)), line});
            continue;
        }
        throw ConfigError("line " + std::to_string(line) + ": unexpected character '" + std::string(1, c) +
                          "'");
    }
    tokens_.push_back({Token::Kind::end, "", line});
}

Token TokenStream::next() {
    Token t = tokens_[pos_];
    if (t.kind != Token::Kind::end) ++pos_;
    return t;
}

bool TokenStream::accept_word(std::string_view w) {
    if (peek().kind == Token::Kind::word && peek().text == w) {
        next();
        return true;
    }
    return false;
}

void TokenStream::expect_word(std::string_view w) {
    if (!accept_word(w)) fail("expected '" + std::string(w) + "'");
}

std::string TokenStream::expect_any_word(const char *what) {
    if (peek().kind != Token::Kind::word) fail(std::string("expected ") + what);
    return next().text;
}

std::string TokenStream::expect_string(const char *what) {
    if (peek().kind != Token::Kind::string) fail(std::string("expected quoted string for ") + what);
    return next().text;
}

Bytes TokenStream::expect_string_bytes(const char *what) {
    return to_bytes(expect_string(what));
}

std::int64_t TokenStream::expect_int(const char *what) {
    std::string w = expect_any_word(what);
    try {
        std::size_t used = 0;
        std::int64_t v = std::stoll(w, &used);
        if (used != w.size()) throw std::invalid_argument(w);
        return v;
    } catch (const std::exception &) {
        fail("expected integer for " + std::string(what) + ", got '" + w + "'");
    }
}

double TokenStream::expect_number(const char *what) {
    std::string w = expect_any_word(what);
    try {
        std::size_t used = 0;
        double v = std::stod(w, &used);
        if (used != w.size()) throw std::invalid_argument(w);
        return v;
    } catch (const std::exception &) {
        fail("expected number for " + std::string(what) + ", got '" + w + "'");
    }
}

void TokenStream::expect(Token::Kind kind, const char *what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    next();
}

void TokenStream::fail(const std::string &msg) const {
    throw ConfigError("line " + std::to_string(peek().line) + ": " + msg +
                      (peek().kind == Token::Kind::end ? " (at end of file)" : ""));
}

std::string quote_config_string(std::span<const std::uint8_t> bytes) {
    std::string out = "\"";
    char buf[8];
    for (std::uint8_t b : bytes) {
        switch (b) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\r': out += "\\r"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\0': out += "\\0"; break;
        default:
            if (b >= 0x20 && b < 0x7f) {
                out.push_back(static_cast<char>(b));
            } else {
                std::snprintf(buf, sizeof(buf), "\\x%02x", b);
                out += buf;
            }
        }
    }
    out.push_back('"');
    return out;
}

} // namespace nectar
