#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace effrw {

struct SourceLocation {
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Raised for malformed input text. Carries the location of the offending
/// token so diagnostics can point at it.
class ParseError : public std::runtime_error {
public:
  ParseError(SourceLocation loc, const std::string& message);

  SourceLocation location() const noexcept { return loc_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  SourceLocation loc_;
  std::string detail_;
};

/// A raw s-expression: either an atom or a parenthesised list.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  SourceLocation loc;

  bool is_atom() const noexcept { return !is_list; }
  bool is_atom(std::string_view text) const noexcept { return !is_list && atom == text; }
  std::size_t size() const noexcept { return items.size(); }
  const SExpr& operator[](std::size_t i) const { return items.at(i); }
};

/// Reads every top-level form in `text`. `;` starts a comment running to
/// end of line.
std::vector<SExpr> read_sexprs(std::string_view text);

/// Reads exactly one form; trailing non-whitespace is an error.
SExpr read_sexpr(std::string_view text);

std::string to_string(const SExpr& e);

} // namespace effrw
