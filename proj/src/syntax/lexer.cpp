#include <cctype>

#include "detail/lexer.hpp"

namespace homkit::detail {

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<token> lex(std::string_view text) {
  std::vector<token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    token t;
    t.line = line;
    t.col = col;
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = tok::ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if ((c == ':' || c == '-') && i + 1 < text.size() && text[i + 1] == (c == ':' ? '-' : '>')) {
      t.kind = tok::punct;
      t.text = std::string(text.substr(i, 2));
      advance(2);
    } else if (std::string_view("(),.:/@{}|").find(c) != std::string_view::npos) {
      t.kind = tok::punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      fail(error_kind::parse, std::to_string(line) + ":" + std::to_string(col) + ": unexpected character '" + std::string(1, c) + "'");
    }
    out.push_back(std::move(t));
  }
  token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

void cursor::error(const std::string& msg) const {
  const token& t = peek();
  std::string near = t.kind == tok::end ? "end of input" : "'" + t.text + "'";
  fail(error_kind::parse, std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + msg + " (near " + near + ")");
}

token cursor::expect(const char* punct) {
  if (!is(punct)) error(std::string("expected '") + punct + "'");
  return next();
}

token cursor::expect_ident(const char* what) {
  if (!is_ident()) error(std::string("expected ") + what);
  return next();
}

std::size_t parse_arity(const token& t, const cursor& c) {
  for (char ch : t.text)
    if (!std::isdigit(static_cast<unsigned char>(ch))) c.error("expected arity");
  return static_cast<std::size_t>(std::stoul(t.text));
}

}  // namespace homkit::detail
