#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nectar/bytes.hpp"

namespace nectar {

// Shared lexical layer for the service-profile and scenario file formats.
//
//   # comment to end of line
//   service shellemu {
//     port 1337
//     dialog {
//       send "220 ready\r\n"
//       expect "RUN" timeout 5
//     }
//     capture after_trigger "RUN"
//   }
//
// Tokens are bare words ([A-Za-z0-9_.:/-]+), quoted strings with escapes
// (\\ \" \r \n \t \0 \xNN), and braces. Newlines are whitespace.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

struct Token {
    enum class Kind { word, string, lbrace, rbrace, end };
    Kind kind = Kind::end;
    std::string text;  // word text or decoded string bytes
    int line = 0;
};

class TokenStream {
  public:
    explicit TokenStream(std::string_view input);

    const Token &peek() const { return tokens_[pos_]; }
    Token next();

    bool accept_word(std::string_view w);
    void expect_word(std::string_view w);
    std::string expect_any_word(const char *what);
    std::string expect_string(const char *what);
    Bytes expect_string_bytes(const char *what);
    std::int64_t expect_int(const char *what);
    double expect_number(const char *what);
    void expect(Token::Kind kind, const char *what);
    bool at_end() const { return peek().kind == Token::Kind::end; }

    [[noreturn]] void fail(const std::string &msg) const;

  private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// Quotes arbitrary bytes as a config string literal.
std::string quote_config_string(std::span<const std::uint8_t> bytes);
inline std::string quote_config_string(std::string_view s) {
    return quote_config_string(
        std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t *>(s.data()), s.size()));
}

} // namespace nectar
