#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ltag {

/// Error raised while reading any of the plain-text formats. Carries a
/// "source:line: message" rendering in what().
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string source, int line, const std::string& message)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

namespace text {

inline bool is_delimiter(char c) {
  switch (c) {
    case '(': case ')': case '[': case ']': case '{': case '}':
    case '=': case ',': case '#': case ':':
      return true;
    default:
      return false;
  }
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

/// Feature names and atomic values: [A-Za-z0-9_+-]+
inline bool is_symbol(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '+' || c == '-')) return false;
  }
  return true;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

struct Token {
  enum class Kind { Word, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0;

  bool is(char p) const { return kind == Kind::Punct && text.size() == 1 && text[0] == p; }
  bool is_word() const { return kind == Kind::Word; }
  bool is_word(std::string_view w) const { return kind == Kind::Word && text == w; }
};

/// Tokenizer shared by the tree, metarule and feature-structure formats.
/// Words are maximal runs of non-space, non-delimiter bytes (so UTF-8 tree
/// ids pass through untouched). `%` starts a comment running to end of line.
class Lexer {
 public:
  Lexer(std::string_view input, std::string source = "<input>", int first_line = 1)
      : source_(std::move(source)) {
    int line = first_line;
    std::size_t i = 0;
    while (i < input.size()) {
      char c = input[i];
      if (c == '\n') {
        ++line;
        ++i;
      } else if (is_space(c)) {
        ++i;
      } else if (c == '%') {
        while (i < input.size() && input[i] != '\n') ++i;
      } else if (is_delimiter(c)) {
        tokens_.push_back({Token::Kind::Punct, std::string(1, c), line});
        ++i;
      } else {
        std::size_t j = i;
        while (j < input.size() && !is_space(input[j]) && !is_delimiter(input[j]) && input[j] != '%') ++j;
        tokens_.push_back({Token::Kind::Word, std::string(input.substr(i, j - i)), line});
        i = j;
      }
    }
    tokens_.push_back({Token::Kind::End, "", line});
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = pos_ + ahead;
    return k < tokens_.size() ? tokens_[k] : tokens_.back();
  }
  Token next() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  void expect(char p) {
    Token t = next();
    if (!t.is(p)) error(t, std::string("expected '") + p + "'");
  }
  std::string expect_word(std::string_view what = "word") {
    Token t = next();
    if (!t.is_word()) error(t, "expected " + std::string(what));
    return t.text;
  }
  bool accept(char p) {
    if (peek().is(p)) {
      next();
      return true;
    }
    return false;
  }

  [[noreturn]] void error(const Token& at, const std::string& message) const {
    std::string found = at.kind == Token::Kind::End ? "end of input" : "'" + at.text + "'";
    throw SyntaxError(source_, at.line, message + ", found " + found);
  }
  [[noreturn]] void error(const std::string& message) const { error(peek(), message); }

  const std::string& source() const { return source_; }
  int line() const { return peek().line; }

 private:
  std::string source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace text
}  // namespace ltag
