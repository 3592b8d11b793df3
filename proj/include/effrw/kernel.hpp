#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "effrw/sexpr.hpp"
#include "effrw/signature.hpp"
#include "effrw/term.hpp"
#include "effrw/type.hpp"

namespace effrw {

// ---------------------------------------------------------------------------
// Binding discipline

std::set<std::string> free_vars(const Term& t);
bool occurs_free(const std::string& x, const Term& t);

/// `base` followed by enough primes to avoid every name in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

/// Capture-avoiding substitution t{replacement/var}. Binders that would
/// capture a free variable of `replacement` are renamed.
Term substitute(const Term& body, const std::string& var, const Term& replacement);

bool alpha_eq(const Term& a, const Term& b);

/// Canonical rendering with de Bruijn indices for bound variables. Two
/// terms have the same key iff they are alpha-equivalent.
std::string canonical_key(const Term& t);

/// Hash invariant under alpha-renaming: alpha-equivalent terms hash equal.
std::size_t alpha_hash(const Term& t);

// ---------------------------------------------------------------------------
// Concrete syntax

/// Canonical single-space s-expression rendering.
std::string print_term(const Term& t);

/// Parses the term grammar against `sig`. Throws ParseError (with a source
/// location) on syntax errors, unknown symbols, bad parameters and arity
/// mismatches.
Term parse_term(std::string_view text, SignatureView sig);
Term parse_term(const SExpr& e, SignatureView sig);

/// `B`, `(E T)`, `(-> S T)`; `(-> A B C)` associates to the right.
Type parse_type(const SExpr& e);
Type parse_type(std::string_view text);

// ---------------------------------------------------------------------------
// Typing

class TypeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Ordered variable typing; later bindings shadow earlier ones.
class TypingContext {
public:
  TypingContext() = default;
  TypingContext(std::initializer_list<std::pair<std::string, Type>> init);

  TypingContext extended(std::string name, Type type) const;
  void push(std::string name, Type type) { entries_.emplace_back(std::move(name), std::move(type)); }
  void pop() { entries_.pop_back(); }
  std::optional<Type> lookup(const std::string& name) const;
  const std::vector<std::pair<std::string, Type>>& entries() const noexcept { return entries_; }

private:
  std::vector<std::pair<std::string, Type>> entries_;
};

/// Unification-based inference for the typing rules (binders are
/// unannotated). Metas are shared across calls on one instance, so two
/// terms can be checked under a common variable typing.
class Typechecker {
public:
  explicit Typechecker(SignatureView sig) : sig_(sig) {}

  Type fresh();
  /// Throws TypeError with `what` as context when the types cannot agree.
  void unify(const Type& a, const Type& b, const std::string& what);
  Type infer(TypingContext& ctx, const Term& t);
  /// Applies the current substitution.
  Type resolve(const Type& t) const;

private:
  bool occurs(int id, const Type& t) const;
  Type walk(const Type& t) const;

  SignatureView sig_;
  std::vector<std::optional<Type>> subst_;
};

/// Principal type of `t` under `ctx`, with unconstrained parts as metas
/// numbered from 0 in order of appearance. Throws TypeError.
Type infer_type(const TypingContext& ctx, const Term& t, SignatureView sig);

/// Renumbers metas 0, 1, ... in order of first appearance.
Type canonical_metas(const Type& t);

/// True when `specific` is obtained from `general` by instantiating metas.
bool type_instance_of(const Type& general, const Type& specific);

} // namespace effrw
