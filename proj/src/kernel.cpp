#include "effrw/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

namespace effrw {

// ---------------------------------------------------------------------------
// Binding discipline

namespace {

bool binds_in_child(const Term& t, std::size_t child) {
  switch (t.kind()) {
  case TermKind::Lam: return true;
  case TermKind::Let: return child == 1;
  default: return false;
  }
}

void collect_free(const Term& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (t.is(TermKind::Var)) {
    if (std::find(bound.begin(), bound.end(), t.name()) == bound.end()) out.insert(t.name());
    return;
  }
  for (std::size_t i = 0; i < t.arity(); ++i) {
    bool binds = binds_in_child(t, i);
    if (binds) bound.push_back(t.name());
    collect_free(t.child(i), bound, out);
    if (binds) bound.pop_back();
  }
}

} // namespace

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(t, bound, out);
  return out;
}

bool occurs_free(const std::string& x, const Term& t) {
  if (t.is(TermKind::Var)) return t.name() == x;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (binds_in_child(t, i) && t.name() == x) continue;
    if (occurs_free(x, t.child(i))) return true;
  }
  return false;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string name = base + "'";
  while (avoid.count(name)) name += "'";
  return name;
}

namespace {

Term subst(const Term& t, const std::string& x, const Term& s, const std::set<std::string>& fv_s) {
  switch (t.kind()) {
  case TermKind::Var: return t.name() == x ? s : t;
  case TermKind::Lam:
  case TermKind::Let: {
    std::vector<Term> kids(t.children().begin(), t.children().end());
    bool changed = false;
    std::string binder = t.name();
    if (t.is(TermKind::Let)) {
      Term subj = subst(kids[0], x, s, fv_s);
      changed = subj.identity() != kids[0].identity();
      kids[0] = std::move(subj);
    }
    Term& body = kids.back();
    if (binder != x && occurs_free(x, body)) {
      if (fv_s.count(binder)) {
        std::set<std::string> avoid = fv_s;
        auto fv_body = free_vars(body);
        avoid.insert(fv_body.begin(), fv_body.end());
        avoid.insert(x);
        std::string renamed = fresh_name(binder, avoid);
        body = subst(body, binder, Term::var(renamed), {renamed});
        binder = renamed;
      }
      body = subst(body, x, s, fv_s);
      changed = true;
    }
    if (!changed) return t;
    if (t.is(TermKind::Lam)) return Term::lam(binder, std::move(body));
    return Term::let(binder, std::move(kids[0]), std::move(body));
  }
  default: {
    std::vector<Term> kids;
    kids.reserve(t.arity());
    bool changed = false;
    for (const auto& c : t.children()) {
      kids.push_back(subst(c, x, s, fv_s));
      changed = changed || kids.back().identity() != c.identity();
    }
    return changed ? t.with_children(std::move(kids)) : t;
  }
  }
}

using NameStack = std::vector<const std::string*>;

/// Distance from the innermost binder of `x`, or -1 when free.
long binder_distance(const NameStack& env, const std::string& x) {
  for (std::size_t k = env.size(); k-- > 0;)
    if (*env[k] == x) return static_cast<long>(env.size() - 1 - k);
  return -1;
}

bool same_names(const NameStack& a, const NameStack& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (*a[i] != *b[i]) return false;
  return true;
}

bool alpha_rec(const Term& a, const Term& b, NameStack& env_a, NameStack& env_b) {
  if (a.identity() == b.identity() && same_names(env_a, env_b)) return true;
  if (a.kind() != b.kind() || a.arity() != b.arity()) return false;
  switch (a.kind()) {
  case TermKind::Var: {
    long da = binder_distance(env_a, a.name()), db = binder_distance(env_b, b.name());
    if (da < 0 || db < 0) return da < 0 && db < 0 && a.name() == b.name();
    return da == db;
  }
  case TermKind::Sym:
    if (a.name() != b.name() || a.params() != b.params() || a.symbol_kind() != b.symbol_kind())
      return false;
    break;
  default: break;
  }
  for (std::size_t i = 0; i < a.arity(); ++i) {
    bool binds = binds_in_child(a, i);
    if (binds) {
      env_a.push_back(&a.name());
      env_b.push_back(&b.name());
    }
    bool ok = alpha_rec(a.child(i), b.child(i), env_a, env_b);
    if (binds) {
      env_a.pop_back();
      env_b.pop_back();
    }
    if (!ok) return false;
  }
  return true;
}

void key_rec(const Term& t, std::vector<std::string>& env, std::string& out) {
  switch (t.kind()) {
  case TermKind::Var: {
    auto it = std::find(env.rbegin(), env.rend(), t.name());
    if (it == env.rend()) {
      out += '$';
      out += t.name();
    } else {
      out += '#';
      out += std::to_string(it - env.rbegin());
    }
    out += ' ';
    return;
  }
  case TermKind::Lam: out += "(L "; break;
  case TermKind::App: out += "(A "; break;
  case TermKind::Pure: out += "(P "; break;
  case TermKind::Let: out += "(D "; break;
  case TermKind::Sym:
    out += t.is_effect() ? "(E " : "(F ";
    out += t.name();
    for (const auto& p : t.params()) {
      out += '_';
      out += p;
    }
    out += ' ';
    break;
  }
  for (std::size_t i = 0; i < t.arity(); ++i) {
    bool binds = binds_in_child(t, i);
    if (binds) env.push_back(t.name());
    key_rec(t.child(i), env, out);
    if (binds) env.pop_back();
  }
  out += ") ";
}

} // namespace

Term substitute(const Term& body, const std::string& var, const Term& replacement) {
  return subst(body, var, replacement, free_vars(replacement));
}

bool alpha_eq(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return true;
  NameStack ea, eb;
  return alpha_rec(a, b, ea, eb);
}

std::string canonical_key(const Term& t) {
  std::string out;
  out.reserve(t.size() * 4);
  std::vector<std::string> env;
  key_rec(t, env, out);
  return out;
}

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_rec(const Term& t, std::vector<const std::string*>& env) {
  static const std::hash<std::string> hs;
  std::size_t h = static_cast<std::size_t>(t.kind()) + 1;
  if (t.is(TermKind::Var)) {
    for (std::size_t k = env.size(); k-- > 0;)
      if (*env[k] == t.name()) return mix(h, env.size() - k);
    return mix(mix(h, 0x51ed27), hs(t.name()));
  }
  if (t.is(TermKind::Sym)) {
    h = mix(h, hs(t.name()));
    for (const auto& p : t.params()) h = mix(h, hs(p));
  }
  for (std::size_t i = 0; i < t.arity(); ++i) {
    bool binds = binds_in_child(t, i);
    if (binds) env.push_back(&t.name());
    h = mix(h, hash_rec(t.child(i), env));
    if (binds) env.pop_back();
  }
  return h;
}

} // namespace

std::size_t alpha_hash(const Term& t) {
  std::vector<const std::string*> env;
  return hash_rec(t, env);
}

// ---------------------------------------------------------------------------
// Concrete syntax

namespace {

void print_rec(const Term& t, std::string& out) {
  switch (t.kind()) {
  case TermKind::Var: out += t.name(); return;
  case TermKind::Lam: out += "(lam " + t.name() + " "; break;
  case TermKind::App: out += "(app "; break;
  case TermKind::Pure: out += "(pure "; break;
  case TermKind::Let: out += "(let " + t.name() + " "; break;
  case TermKind::Sym:
    if (t.is_effect()) {
      out += "(eff " + t.name() + " (";
      for (std::size_t i = 0; i < t.params().size(); ++i) {
        if (i) out += ' ';
        out += t.params()[i];
      }
      out += ")";
    } else {
      out += "(fn " + t.name();
      if (!t.params().empty()) {
        out += " (";
        for (std::size_t i = 0; i < t.params().size(); ++i) {
          if (i) out += ' ';
          out += t.params()[i];
        }
        out += ")";
      }
    }
    if (t.arity() == 0) {
      out += ")";
      return;
    }
    out += ' ';
    break;
  }
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ' ';
    print_rec(t.child(i), out);
  }
  out += ')';
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"lam", "app", "pure", "let", "eff", "fn"};
  return k;
}

bool valid_ident(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c == '(' || c == ')' || c == ';' || c == '"') return false;
  return true;
}

std::string expect_ident(const SExpr& e, const char* what) {
  if (!e.is_atom() || !valid_ident(e.atom))
    throw ParseError(e.loc, std::string("expected ") + what);
  return e.atom;
}

void expect_size(const SExpr& e, std::size_t n, const std::string& form) {
  if (e.size() != n)
    throw ParseError(e.loc, "'" + form + "' expects " + std::to_string(n - 1) + " operands, got " +
                                std::to_string(e.size() - 1));
}

} // namespace

std::string print_term(const Term& t) {
  std::string out;
  print_rec(t, out);
  return out;
}

Term parse_term(const SExpr& e, SignatureView sig) {
  if (e.is_atom()) return Term::var(expect_ident(e, "variable"));
  if (e.items.empty()) throw ParseError(e.loc, "empty list is not a term");
  const SExpr& head = e[0];
  if (!head.is_atom() || !keywords().count(head.atom))
    throw ParseError(head.loc, "expected one of lam, app, pure, let, eff, fn");
  const std::string& kw = head.atom;
  if (kw == "lam") {
    expect_size(e, 3, kw);
    return Term::lam(expect_ident(e[1], "binder"), parse_term(e[2], sig));
  }
  if (kw == "app") {
    expect_size(e, 3, kw);
    return Term::app(parse_term(e[1], sig), parse_term(e[2], sig));
  }
  if (kw == "pure") {
    expect_size(e, 2, kw);
    return Term::pure(parse_term(e[1], sig));
  }
  if (kw == "let") {
    expect_size(e, 4, kw);
    return Term::let(expect_ident(e[1], "binder"), parse_term(e[2], sig), parse_term(e[3], sig));
  }

  // eff / fn
  if (e.size() < 2) throw ParseError(e.loc, "'" + kw + "' needs a symbol name");
  std::string name = expect_ident(e[1], "symbol name");
  const SymbolDecl* decl = sig.find(name);
  if (!decl) throw ParseError(e[1].loc, "unknown symbol '" + name + "'");

  std::size_t next = 2;
  std::vector<std::string> params;
  bool has_param_list = kw == "eff" || decl->param_domain.has_value();
  if (has_param_list) {
    if (e.size() <= next || !e[next].is_list)
      throw ParseError(e.loc, "'" + name + "' expects a parameter list");
    for (const auto& p : e[next].items) {
      if (!p.is_atom()) throw ParseError(p.loc, "parameter must be an atom");
      params.push_back(p.atom);
    }
    ++next;
  }
  if (params.size() != decl->param_count())
    throw ParseError(e.loc, "'" + name + "' expects " + std::to_string(decl->param_count()) +
                                " parameter(s), got " + std::to_string(params.size()));
  if (decl->param_domain && !decl->param_domain->contains(params[0]))
    throw ParseError(e.loc, "parameter '" + params[0] + "' is not in domain '" +
                                decl->param_domain->name + "'");
  std::vector<Term> args;
  for (std::size_t i = next; i < e.size(); ++i) args.push_back(parse_term(e[i], sig));
  if (args.size() != decl->arity())
    throw ParseError(e.loc, "arity mismatch: '" + name + "' takes " +
                                std::to_string(decl->arity()) + " argument(s), got " +
                                std::to_string(args.size()));
  return Term::sym(decl->kind, name, std::move(params), std::move(args));
}

Term parse_term(std::string_view text, SignatureView sig) {
  return parse_term(read_sexpr(text), sig);
}

Type parse_type(const SExpr& e) {
  if (e.is_atom()) {
    if (e.atom == "E" || e.atom == "->" || !valid_ident(e.atom))
      throw ParseError(e.loc, "expected a type, got '" + e.atom + "'");
    return Type::base(e.atom);
  }
  if (e.size() == 2 && e[0].is_atom("E")) return Type::eff(parse_type(e[1]));
  if (e.size() >= 3 && e[0].is_atom("->")) {
    Type result = parse_type(e.items.back());
    for (std::size_t i = e.size() - 2; i >= 1; --i) result = Type::arrow(parse_type(e[i]), result);
    return result;
  }
  throw ParseError(e.loc, "malformed type " + to_string(e));
}

Type parse_type(std::string_view text) { return parse_type(read_sexpr(text)); }

// ---------------------------------------------------------------------------
// Typing

TypingContext::TypingContext(std::initializer_list<std::pair<std::string, Type>> init)
    : entries_(init) {}

TypingContext TypingContext::extended(std::string name, Type type) const {
  TypingContext out = *this;
  out.push(std::move(name), std::move(type));
  return out;
}

std::optional<Type> TypingContext::lookup(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == name) return it->second;
  return std::nullopt;
}

Type Typechecker::fresh() {
  subst_.emplace_back();
  return Type::meta(static_cast<int>(subst_.size() - 1));
}

Type Typechecker::walk(const Type& t) const {
  Type cur = t;
  while (cur.is_meta() && cur.meta_id() >= 0 &&
         static_cast<std::size_t>(cur.meta_id()) < subst_.size() && subst_[cur.meta_id()])
    cur = *subst_[cur.meta_id()];
  return cur;
}

Type Typechecker::resolve(const Type& t) const {
  Type w = walk(t);
  switch (w.kind()) {
  case Type::Kind::Eff: return Type::eff(resolve(w.first()));
  case Type::Kind::Arrow: return Type::arrow(resolve(w.first()), resolve(w.second()));
  default: return w;
  }
}

bool Typechecker::occurs(int id, const Type& t) const {
  Type w = walk(t);
  switch (w.kind()) {
  case Type::Kind::Meta: return w.meta_id() == id;
  case Type::Kind::Eff: return occurs(id, w.first());
  case Type::Kind::Arrow: return occurs(id, w.first()) || occurs(id, w.second());
  default: return false;
  }
}

void Typechecker::unify(const Type& a, const Type& b, const std::string& what) {
  Type x = walk(a), y = walk(b);
  auto fail = [&] {
    throw TypeError(what + ": cannot match " + to_string(canonical_metas(resolve(x))) + " with " +
                    to_string(canonical_metas(resolve(y))));
  };
  if (x.is_meta() && y.is_meta() && x.meta_id() == y.meta_id()) return;
  if (x.is_meta()) {
    if (occurs(x.meta_id(), y)) fail();
    subst_[x.meta_id()] = y;
    return;
  }
  if (y.is_meta()) {
    if (occurs(y.meta_id(), x)) fail();
    subst_[y.meta_id()] = x;
    return;
  }
  if (x.kind() != y.kind()) fail();
  switch (x.kind()) {
  case Type::Kind::Base:
    if (x.name() != y.name()) fail();
    return;
  case Type::Kind::Eff: unify(x.first(), y.first(), what); return;
  case Type::Kind::Arrow:
    unify(x.first(), y.first(), what);
    unify(x.second(), y.second(), what);
    return;
  default: return;
  }
}

Type Typechecker::infer(TypingContext& ctx, const Term& t) {
  switch (t.kind()) {
  case TermKind::Var: {
    auto ty = ctx.lookup(t.name());
    if (!ty) throw TypeError("unbound variable '" + t.name() + "'");
    return *ty;
  }
  case TermKind::Lam: {
    Type dom = fresh();
    ctx.push(t.name(), dom);
    Type cod = infer(ctx, t.child(0));
    ctx.pop();
    return Type::arrow(dom, cod);
  }
  case TermKind::App: {
    Type fun = infer(ctx, t.child(0));
    Type arg = infer(ctx, t.child(1));
    Type res = fresh();
    unify(fun, Type::arrow(arg, res), "application of " + print_term(t.child(0)));
    return res;
  }
  case TermKind::Pure: return Type::eff(infer(ctx, t.child(0)));
  case TermKind::Let: {
    Type inner = fresh();
    unify(infer(ctx, t.child(0)), Type::eff(inner),
          "let subject must have an effect type");
    ctx.push(t.name(), inner);
    Type body = infer(ctx, t.child(1));
    ctx.pop();
    Type result = fresh();
    unify(body, Type::eff(result), "let body must have an effect type");
    return Type::eff(result);
  }
  case TermKind::Sym: {
    const SymbolDecl* decl = sig_.find(t.name());
    if (!decl) throw TypeError("undeclared symbol '" + t.name() + "'");
    if (decl->kind != t.symbol_kind())
      throw TypeError("symbol '" + t.name() + "' used with the wrong kind");
    if (decl->arity() != t.arity())
      throw TypeError("symbol '" + t.name() + "' applied to " + std::to_string(t.arity()) +
                      " argument(s), declared " + std::to_string(decl->arity()));
    if (decl->kind == SymbolKind::Effect) {
      Type result = fresh();
      for (std::size_t i = 0; i < t.arity(); ++i)
        unify(infer(ctx, t.child(i)), Type::eff(result),
              "argument " + std::to_string(i + 1) + " of effect '" + t.name() + "'");
      return Type::eff(result);
    }
    for (std::size_t i = 0; i < t.arity(); ++i)
      unify(infer(ctx, t.child(i)), decl->arg_types[i],
            "argument " + std::to_string(i + 1) + " of '" + t.name() + "'");
    return *decl->result_type;
  }
  }
  throw TypeError("unreachable");
}

Type infer_type(const TypingContext& ctx, const Term& t, SignatureView sig) {
  Typechecker tc(sig);
  TypingContext local = ctx;
  return canonical_metas(tc.resolve(tc.infer(local, t)));
}

namespace {

Type renumber(const Type& t, std::map<int, int>& names) {
  switch (t.kind()) {
  case Type::Kind::Meta: {
    auto [it, _] = names.emplace(t.meta_id(), static_cast<int>(names.size()));
    return Type::meta(it->second);
  }
  case Type::Kind::Eff: return Type::eff(renumber(t.first(), names));
  case Type::Kind::Arrow: {
    Type a = renumber(t.first(), names);
    return Type::arrow(a, renumber(t.second(), names));
  }
  default: return t;
  }
}

bool match_type(const Type& g, const Type& s, std::map<int, Type>& bind) {
  if (g.is_meta()) {
    auto [it, inserted] = bind.emplace(g.meta_id(), s);
    return inserted || it->second == s;
  }
  if (g.kind() != s.kind()) return false;
  switch (g.kind()) {
  case Type::Kind::Base: return g.name() == s.name();
  case Type::Kind::Eff: return match_type(g.first(), s.first(), bind);
  case Type::Kind::Arrow:
    return match_type(g.first(), s.first(), bind) && match_type(g.second(), s.second(), bind);
  default: return false;
  }
}

} // namespace

Type canonical_metas(const Type& t) {
  std::map<int, int> names;
  return renumber(t, names);
}

bool type_instance_of(const Type& general, const Type& specific) {
  std::map<int, Type> bind;
  return match_type(general, specific, bind);
}

} // namespace effrw
