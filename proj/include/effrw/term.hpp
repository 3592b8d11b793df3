#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace effrw {

enum class SymbolKind { Effect, Function };

/// A rewritable symbol identity: the symbol name together with its effect
/// parameters. `assign` with parameter `1` and `assign` with parameter `2`
/// are distinct identities.
struct SymbolId {
  std::string name;
  std::vector<std::string> params;

  friend auto operator<=>(const SymbolId&, const SymbolId&) = default;
  friend bool operator==(const SymbolId&, const SymbolId&) = default;
};

/// `name` or `name_p1_p2`.
std::string to_string(const SymbolId& id);

enum class TermKind { Var, Lam, App, Pure, Let, Sym };

/// Immutable metalanguage term with named binders.
///
/// Children are indexed uniformly, which is what `Position` paths refer to:
///   Lam  [0] body
///   App  [0] function, [1] argument
///   Pure [0] body
///   Let  [0] subject, [1] body (the binder scopes over the body only)
///   Sym  [i] i-th argument
///
/// Copies share structure; a Term is cheap to pass by value.
class Term {
public:
  static Term var(std::string name);
  static Term lam(std::string binder, Term body);
  static Term app(Term fun, Term arg);
  static Term pure(Term body);
  static Term let(std::string binder, Term subject, Term body);
  static Term sym(SymbolKind kind, std::string name, std::vector<std::string> params,
                  std::vector<Term> args);

  TermKind kind() const noexcept { return node_->kind; }
  bool is(TermKind k) const noexcept { return node_->kind == k; }
  bool is_effect() const noexcept {
    return node_->kind == TermKind::Sym && node_->symbol_kind == SymbolKind::Effect;
  }

  /// Variable name, binder name (Lam/Let), or symbol name (Sym).
  const std::string& name() const noexcept { return node_->name; }
  SymbolKind symbol_kind() const noexcept { return node_->symbol_kind; }
  const std::vector<std::string>& params() const noexcept { return node_->params; }
  SymbolId symbol() const { return SymbolId{node_->name, node_->params}; }

  std::span<const Term> children() const noexcept { return node_->children; }
  const Term& child(std::size_t i) const { return node_->children.at(i); }
  std::size_t arity() const noexcept { return node_->children.size(); }

  /// Number of nodes in the tree.
  std::size_t size() const noexcept { return node_->size; }

  /// Identity of the shared node, for cheap "same object" checks.
  const void* identity() const noexcept { return node_.get(); }

  /// Same node kind and payload, new children.
  Term with_children(std::vector<Term> children) const;
  /// Same node kind and children, new binder/variable name.
  Term with_name(std::string name) const;

private:
  struct Node {
    TermKind kind;
    SymbolKind symbol_kind = SymbolKind::Effect;
    std::string name;
    std::vector<std::string> params;
    std::vector<Term> children;
    std::size_t size = 1;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term make(TermKind kind, SymbolKind sk, std::string name, std::vector<std::string> params,
                   std::vector<Term> children);

  std::shared_ptr<const Node> node_;
};

/// Syntactic (not alpha) equality.
bool syntactically_equal(const Term& a, const Term& b);

/// True when the term uses only variables and symbol applications.
bool is_symbolic(const Term& t);

} // namespace effrw
