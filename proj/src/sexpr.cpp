#include "effrw/sexpr.hpp"

#include <cctype>
#include <sstream>

namespace effrw {

namespace {

std::string format_location(SourceLocation loc, const std::string& message) {
  std::ostringstream os;
  os << loc.line << ":" << loc.column << ": " << message;
  return os.str();
}

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(loc_, "unexpected end of input");
    SExpr e;
    e.loc = loc_;
    char c = text_[pos_];
    if (c == ')') throw ParseError(loc_, "unexpected ')'");
    if (c == '(') {
      advance();
      e.is_list = true;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError(e.loc, "unclosed '('");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) advance();
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

  SourceLocation location() const { return loc_; }

private:
  static bool is_delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++loc_.line;
      loc_.column = 1;
    } else {
      ++loc_.column;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  SourceLocation loc_;
};

} // namespace

ParseError::ParseError(SourceLocation loc, const std::string& message)
    : std::runtime_error(format_location(loc, message)), loc_(loc), detail_(message) {}

std::vector<SExpr> read_sexprs(std::string_view text) {
  Reader r(text);
  std::vector<SExpr> out;
  while (!r.at_end()) out.push_back(r.read());
  return out;
}

SExpr read_sexpr(std::string_view text) {
  Reader r(text);
  if (r.at_end()) throw ParseError(r.location(), "empty input");
  SExpr e = r.read();
  if (!r.at_end()) throw ParseError(r.location(), "trailing input after expression");
  return e;
}

std::string to_string(const SExpr& e) {
  if (e.is_atom()) return e.atom;
  std::string out = "(";
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    out += to_string(e.items[i]);
  }
  out += ')';
  return out;
}

} // namespace effrw
