#include "effrw/term.hpp"

namespace effrw {

std::string to_string(const SymbolId& id) {
  std::string out = id.name;
  for (const auto& p : id.params) out += "_" + p;
  return out;
}

Term Term::make(TermKind kind, SymbolKind sk, std::string name, std::vector<std::string> params,
                std::vector<Term> children) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->symbol_kind = sk;
  n->name = std::move(name);
  n->params = std::move(params);
  std::size_t size = 1;
  for (const auto& c : children) size += c.size();
  n->children = std::move(children);
  n->size = size;
  return Term(std::move(n));
}

Term Term::var(std::string name) {
  return make(TermKind::Var, SymbolKind::Effect, std::move(name), {}, {});
}

Term Term::lam(std::string binder, Term body) {
  return make(TermKind::Lam, SymbolKind::Effect, std::move(binder), {}, {std::move(body)});
}

Term Term::app(Term fun, Term arg) {
  return make(TermKind::App, SymbolKind::Effect, {}, {}, {std::move(fun), std::move(arg)});
}

Term Term::pure(Term body) {
  return make(TermKind::Pure, SymbolKind::Effect, {}, {}, {std::move(body)});
}

Term Term::let(std::string binder, Term subject, Term body) {
  return make(TermKind::Let, SymbolKind::Effect, std::move(binder), {},
              {std::move(subject), std::move(body)});
}

Term Term::sym(SymbolKind kind, std::string name, std::vector<std::string> params,
               std::vector<Term> args) {
  return make(TermKind::Sym, kind, std::move(name), std::move(params), std::move(args));
}

Term Term::with_children(std::vector<Term> children) const {
  return make(node_->kind, node_->symbol_kind, node_->name, node_->params, std::move(children));
}

Term Term::with_name(std::string name) const {
  return make(node_->kind, node_->symbol_kind, std::move(name), node_->params, node_->children);
}

bool syntactically_equal(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return true;
  if (a.kind() != b.kind() || a.name() != b.name() || a.arity() != b.arity()) return false;
  if (a.is(TermKind::Sym) && (a.symbol_kind() != b.symbol_kind() || a.params() != b.params()))
    return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!syntactically_equal(a.child(i), b.child(i))) return false;
  return true;
}

bool is_symbolic(const Term& t) {
  switch (t.kind()) {
  case TermKind::Var: return true;
  case TermKind::Sym:
    for (const auto& c : t.children())
      if (!is_symbolic(c)) return false;
    return true;
  default: return false;
  }
}

} // namespace effrw
