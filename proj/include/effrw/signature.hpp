#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "effrw/term.hpp"
#include "effrw/type.hpp"

namespace effrw {

/// A named finite set of effect-parameter values, e.g. `val = {0, 1}`.
struct ParamDomain {
  std::string name;
  std::vector<std::string> values;

  bool contains(const std::string& v) const;
  friend bool operator==(const ParamDomain&, const ParamDomain&) = default;
};

/// Declaration of a rewritable symbol.
///
/// Effects carry an arity n and type as E(T) x ... x E(T) -> E(T) for any T.
/// Functions carry a fixed signature S1 x ... x Sn -> T. Either kind may be
/// indexed by a parameter domain, in which case every application names one
/// value of that domain.
struct SymbolDecl {
  std::string name;
  SymbolKind kind = SymbolKind::Effect;
  std::optional<ParamDomain> param_domain;
  std::size_t effect_arity = 0;
  std::vector<Type> arg_types;
  std::optional<Type> result_type;

  std::size_t arity() const noexcept {
    return kind == SymbolKind::Effect ? effect_arity : arg_types.size();
  }
  std::size_t param_count() const noexcept { return param_domain ? 1 : 0; }

  /// All identities of this symbol, one per parameter value.
  std::vector<SymbolId> identities() const;

  static SymbolDecl effect(std::string name, std::size_t arity,
                           std::optional<ParamDomain> domain = std::nullopt);
  static SymbolDecl function(std::string name, std::vector<Type> args, Type result,
                             std::optional<ParamDomain> domain = std::nullopt);

  friend bool operator==(const SymbolDecl& a, const SymbolDecl& b);
};

/// Signature: the set of declared symbols, keyed by name. Same-name
/// symbols of differing arity are rejected.
class Signature {
public:
  void declare(SymbolDecl decl);
  const SymbolDecl* find(const std::string& name) const;
  const SymbolDecl& at(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  const std::map<std::string, SymbolDecl>& decls() const noexcept { return decls_; }
  std::vector<SymbolId> identities() const;
  /// Every identity of an effect symbol.
  std::vector<SymbolId> effect_identities() const;

  friend bool operator==(const Signature&, const Signature&) = default;

private:
  std::map<std::string, SymbolDecl> decls_;
};

/// Read-only handle the parser and typechecker take.
using SignatureView = const Signature&;

} // namespace effrw
