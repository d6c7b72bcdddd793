#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "mcdp/lang/diagnostics.hpp"

namespace mcdp::lang {

enum class TokenKind { identifier, number, string, symbol, arrow, other, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;  // string literals: the unescaped contents
  SourceSpan span;
};

// Splits source text into tokens. '#' starts a comment that runs to the end of
// the line. Bytes outside ASCII become `other` tokens so that units such as
// [°C] survive lexing; the parser decides where they are allowed.
class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run(std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) {
        out.push_back(Token{TokenKind::end, "", here(0)});
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(identifier());
      } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        out.push_back(number(diags));
      } else if (c == '"') {
        out.push_back(string(diags));
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        out.push_back(Token{TokenKind::arrow, "->", here(2)});
        advance(2);
      } else if (static_cast<unsigned char>(c) >= 0x80) {
        std::size_t n = 1;
        while (pos_ + n < src_.size() && (static_cast<unsigned char>(src_[pos_ + n]) & 0xC0) == 0x80) ++n;
        out.push_back(Token{TokenKind::other, std::string(src_.substr(pos_, n)), here(n)});
        advance(n);
      } else if (std::ispunct(static_cast<unsigned char>(c))) {
        out.push_back(Token{TokenKind::symbol, std::string(1, c), here(1)});
        advance(1);
      } else {
        diags.push_back({Severity::error, here(1), "unexpected character (code " + std::to_string(static_cast<int>(c)) + ")"});
        advance(1);
      }
    }
  }

 private:
  SourceSpan here(std::size_t len) const { return SourceSpan{line_, col_, pos_, pos_ + len}; }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        return;
      }
    }
  }

  Token identifier() {
    std::size_t n = 0;
    while (pos_ + n < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_ + n])) || src_[pos_ + n] == '_')) ++n;
    Token t{TokenKind::identifier, std::string(src_.substr(pos_, n)), here(n)};
    advance(n);
    return t;
  }

  Token number(std::vector<Diagnostic>& diags) {
    std::size_t n = 0;
    auto digit = [&](std::size_t k) { return pos_ + k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + k])); };
    while (digit(n)) ++n;
    if (pos_ + n < src_.size() && src_[pos_ + n] == '.') {
      ++n;
      while (digit(n)) ++n;
    }
    if (pos_ + n < src_.size() && (src_[pos_ + n] == 'e' || src_[pos_ + n] == 'E')) {
      std::size_t m = n + 1;
      if (pos_ + m < src_.size() && (src_[pos_ + m] == '+' || src_[pos_ + m] == '-')) ++m;
      if (!digit(m)) {
        Token bad{TokenKind::number, std::string(src_.substr(pos_, m)), here(m)};
        diags.push_back({Severity::error, bad.span, "malformed number '" + bad.text + "': exponent needs digits"});
        advance(m);
        bad.text = "0";
        return bad;
      }
      while (digit(m)) ++m;
      n = m;
    }
    Token t{TokenKind::number, std::string(src_.substr(pos_, n)), here(n)};
    advance(n);
    return t;
  }

  Token string(std::vector<Diagnostic>& diags) {
    SourceSpan start = here(1);
    std::string value;
    std::size_t n = 1;
    while (pos_ + n < src_.size() && src_[pos_ + n] != '"' && src_[pos_ + n] != '\n') {
      if (src_[pos_ + n] == '\\' && pos_ + n + 1 < src_.size() && src_[pos_ + n + 1] != '\n') {
        const char e = src_[pos_ + n + 1];
        value += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        n += 2;
      } else {
        value += src_[pos_ + n];
        ++n;
      }
    }
    if (pos_ + n >= src_.size() || src_[pos_ + n] != '"') {
      start.end = pos_ + n;
      diags.push_back({Severity::error, start, "unterminated string literal"});
      advance(n);
      return Token{TokenKind::string, value, start};
    }
    Token t{TokenKind::string, value, here(n + 1)};
    advance(n + 1);
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace mcdp::lang
