#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "homkit/error.hpp"

namespace homkit::detail {

enum class tok { ident, punct, end };

struct token {
  tok kind = tok::end;
  std::string text;
  int line = 1;
  int col = 1;
};

// Identifiers: [A-Za-z0-9_]+ (a leading '_' is only legal for reserved
// element tokens, checked by the parsers). Punctuation: ( ) , . : / @ { } |
// plus the two-character arrows ":-" and "->".
std::vector<token> lex(std::string_view text);

class cursor {
 public:
  explicit cursor(std::vector<token> toks) : toks_(std::move(toks)) {}

  const token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_end() const { return peek().kind == tok::end; }
  bool is(const char* punct, std::size_t ahead = 0) const {
    return peek(ahead).kind == tok::punct && peek(ahead).text == punct;
  }
  bool is_ident(std::size_t ahead = 0) const { return peek(ahead).kind == tok::ident; }
  bool is_keyword(const char* word, std::size_t ahead = 0) const {
    return is_ident(ahead) && peek(ahead).text == word;
  }
  token next() {
    token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(const char* punct) {
    if (!is(punct)) return false;
    next();
    return true;
  }
  token expect(const char* punct);
  token expect_ident(const char* what);
  [[noreturn]] void error(const std::string& msg) const;

 private:
  std::vector<token> toks_;
  std::size_t pos_ = 0;
};

std::size_t parse_arity(const token& t, const cursor& c);

}  // namespace homkit::detail
