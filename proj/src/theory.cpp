#include "effrw/theory.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "effrw/kernel.hpp"

namespace effrw {

Precedence Theory::precedence() const {
  std::vector<Precedence::Pair> all = declared_precedence;
  all.insert(all.end(), schema_precedence.begin(), schema_precedence.end());
  return Precedence(all);
}

const RewriteRule* Theory::find_rule(const std::string& rule_name) const {
  for (const auto& r : rules)
    if (r.name == rule_name) return &r;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_type_names(const Type& t, const std::vector<std::string>& bases, const std::string& where) {
  switch (t.kind()) {
  case Type::Kind::Base:
    if (std::find(bases.begin(), bases.end(), t.name()) == bases.end())
      throw TheoryError(where + ": undeclared base type '" + t.name() + "'");
    return;
  case Type::Kind::Eff: check_type_names(t.first(), bases, where); return;
  case Type::Kind::Arrow:
    check_type_names(t.first(), bases, where);
    check_type_names(t.second(), bases, where);
    return;
  default: return;
  }
}

void check_rule_typing(const Theory& th, const RewriteRule& rule) {
  Typechecker tc(th.signature);
  TypingContext ctx;
  for (const auto& v : free_vars(rule.lhs)) ctx.push(v, tc.fresh());
  auto side = [&](const Term& t, const char* which) {
    try {
      return tc.infer(ctx, t);
    } catch (const TypeError& e) {
      throw TheoryError("rule '" + rule.name + "': " + which + " is ill-typed: " + e.what());
    }
  };
  Type lt = side(rule.lhs, "left-hand side");
  Type rt = side(rule.rhs, "right-hand side");
  if (rule.extended) return;
  try {
    tc.unify(lt, rt, "sides");
  } catch (const TypeError&) {
    throw TheoryError("rule '" + rule.name + "' is not type preserving: left-hand side has type " +
                      to_string(canonical_metas(tc.resolve(lt))) + ", right-hand side has type " +
                      to_string(canonical_metas(tc.resolve(rt))));
  }
}

} // namespace

void validate_theory(const Theory& t) {
  for (const auto& [name, decl] : t.signature.decls()) {
    for (const auto& a : decl.arg_types) check_type_names(a, t.base_types, "symbol '" + name + "'");
    if (decl.result_type) check_type_names(*decl.result_type, t.base_types, "symbol '" + name + "'");
  }
  std::set<std::string> names;
  for (const auto& rule : t.rules) {
    if (!names.insert(rule.name).second) throw TheoryError("duplicate rule name '" + rule.name + "'");
    try {
      validate_rule(rule);
    } catch (const std::invalid_argument& e) {
      throw TheoryError(e.what());
    }
    check_rule_typing(t, rule);
  }
  try {
    (void)t.precedence();
  } catch (const std::invalid_argument& e) {
    throw TheoryError(e.what());
  }
}

CertReport certify_theory(Theory& t) {
  CertReport report = certify_ruleset(t.precedence(), t.rules);
  for (std::size_t i = 0; i < t.rules.size(); ++i)
    t.rules[i].certified = report.rules[i].status == CertStatus::Certified;
  return report;
}

// ---------------------------------------------------------------------------
// Distribution schemas

namespace {

Term vars_sym(const SymbolId& e, SymbolKind kind, std::vector<Term> args) {
  return Term::sym(kind, e.name, e.params, std::move(args));
}

void instantiate_schemas(Theory& th) {
  std::erase_if(th.rules, [](const RewriteRule& r) { return !r.schema.empty(); });
  th.schema_precedence.clear();
  for (const auto& d : th.distributors) {
    const SymbolDecl* decl = th.signature.find(d);
    if (!decl || decl->kind != SymbolKind::Effect || decl->arity() != 2 || decl->param_domain)
      throw TheoryError("distribute: '" + d + "' must be a declared binary effect without parameters");
    SymbolId dist{d, {}};
    auto dapp = [&](Term a, Term b) {
      return Term::sym(SymbolKind::Effect, d, {}, {std::move(a), std::move(b)});
    };
    for (const auto& e : th.signature.effect_identities()) {
      if (e.name == d) continue;
      std::size_t n = th.signature.at(e.name).arity();
      std::vector<Term> ss, lifted;
      Term t = Term::var("t");
      for (std::size_t i = 1; i <= n; ++i) {
        ss.push_back(Term::var("s" + std::to_string(i)));
        lifted.push_back(dapp(ss.back(), t));
      }
      th.rules.push_back(RewriteRule{d + "-left[" + to_string(e) + "]",
                                     dapp(vars_sym(e, SymbolKind::Effect, ss), t),
                                     vars_sym(e, SymbolKind::Effect, lifted), false, false, d});
      std::vector<Term> ts, lifted_r;
      Term s = Term::var("s");
      for (std::size_t i = 1; i <= n; ++i) {
        ts.push_back(Term::var("t" + std::to_string(i)));
        lifted_r.push_back(dapp(s, ts.back()));
      }
      th.rules.push_back(RewriteRule{d + "-right[" + to_string(e) + "]",
                                     dapp(s, vars_sym(e, SymbolKind::Effect, ts)),
                                     vars_sym(e, SymbolKind::Effect, lifted_r), false, false, d});
      th.schema_precedence.emplace_back(dist, e);
    }
  }
}

} // namespace

// ---------------------------------------------------------------------------
// Loading

namespace {

std::string atom_of(const SExpr& e, const char* what) {
  if (!e.is_atom()) throw ParseError(e.loc, std::string("expected ") + what);
  return e.atom;
}

std::optional<std::size_t> as_count(const std::string& s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

const ParamDomain& find_domain(const Theory& th, const SExpr& e) {
  auto it = th.domains.find(atom_of(e, "domain name"));
  if (it == th.domains.end()) throw ParseError(e.loc, "unknown domain '" + e.atom + "'");
  return it->second;
}

/// `(S1 ... Sn -> T)`
std::pair<std::vector<Type>, Type> parse_signature(const SExpr& e) {
  if (!e.is_list || e.size() < 2 || !e[e.size() - 2].is_atom("->"))
    throw ParseError(e.loc, "expected a signature (S1 ... Sn -> T)");
  std::vector<Type> args;
  for (std::size_t i = 0; i + 2 < e.size(); ++i) args.push_back(parse_type(e[i]));
  return {std::move(args), parse_type(e.items.back())};
}

std::vector<SymbolId> expand_precedence_item(const Theory& th, const SExpr& e) {
  if (e.is_atom()) {
    const SymbolDecl* d = th.signature.find(e.atom);
    if (!d) throw ParseError(e.loc, "precedence names unknown symbol '" + e.atom + "'");
    return d->identities();
  }
  if (e.size() != 2 || !e[0].is_atom() || !e[1].is_atom())
    throw ParseError(e.loc, "expected a symbol name or (NAME PARAM)");
  const SymbolDecl* d = th.signature.find(e[0].atom);
  if (!d) throw ParseError(e.loc, "precedence names unknown symbol '" + e[0].atom + "'");
  if (!d->param_domain || !d->param_domain->contains(e[1].atom))
    throw ParseError(e[1].loc, "'" + e[1].atom + "' is not a parameter of '" + e[0].atom + "'");
  return {SymbolId{d->name, {e[1].atom}}};
}

} // namespace

Theory load_theory(std::string_view text) {
  SExpr top = read_sexpr(text);
  if (!top.is_list || top.size() < 2 || !top[0].is_atom("theory"))
    throw ParseError(top.loc, "expected (theory NAME ...)");
  Theory th;
  th.name = atom_of(top[1], "theory name");

  std::vector<const SExpr*> rules, precedences;
  for (std::size_t i = 2; i < top.size(); ++i) {
    const SExpr& c = top[i];
    if (!c.is_list || c.items.empty() || !c[0].is_atom())
      throw ParseError(c.loc, "expected a theory clause");
    const std::string& kw = c[0].atom;
    try {
      if (kw == "base") {
        for (std::size_t k = 1; k < c.size(); ++k) {
          std::string b = atom_of(c[k], "base type name");
          if (std::find(th.base_types.begin(), th.base_types.end(), b) != th.base_types.end())
            throw ParseError(c[k].loc, "base type '" + b + "' declared twice");
          th.base_types.push_back(b);
        }
      } else if (kw == "domain") {
        if (c.size() != 3 || !c[2].is_list) throw ParseError(c.loc, "expected (domain NAME (v1 v2 ...))");
        ParamDomain d{atom_of(c[1], "domain name"), {}};
        for (const auto& v : c[2].items) d.values.push_back(atom_of(v, "domain value"));
        if (d.values.empty()) throw ParseError(c.loc, "domain '" + d.name + "' is empty");
        if (std::set<std::string>(d.values.begin(), d.values.end()).size() != d.values.size())
          throw ParseError(c.loc, "domain '" + d.name + "' repeats a value");
        if (!th.domains.emplace(d.name, d).second)
          throw ParseError(c.loc, "domain '" + d.name + "' declared twice");
      } else if (kw == "effect") {
        if (c.size() != 3 && c.size() != 4)
          throw ParseError(c.loc, "expected (effect NAME [DOMAIN] ARITY)");
        std::optional<ParamDomain> dom;
        if (c.size() == 4) dom = find_domain(th, c[2]);
        const SExpr& ar = c.items.back();
        std::string ar_text = atom_of(ar, "arity");
        std::size_t arity;
        if (auto n = as_count(ar_text))
          arity = *n;
        else
          arity = find_domain(th, ar).values.size();
        th.signature.declare(SymbolDecl::effect(atom_of(c[1], "effect name"), arity, dom));
      } else if (kw == "function") {
        if (c.size() != 3 && c.size() != 4)
          throw ParseError(c.loc, "expected (function NAME [DOMAIN] (S1 ... Sn -> T))");
        std::optional<ParamDomain> dom;
        if (c.size() == 4) dom = find_domain(th, c[2]);
        auto [args, result] = parse_signature(c.items.back());
        th.signature.declare(
            SymbolDecl::function(atom_of(c[1], "function name"), std::move(args), result, dom));
      } else if (kw == "rule") {
        rules.push_back(&c);
      } else if (kw == "precedence") {
        precedences.push_back(&c);
      } else if (kw == "distribute") {
        for (std::size_t k = 1; k < c.size(); ++k) th.distributors.push_back(atom_of(c[k], "symbol name"));
      } else {
        throw ParseError(c[0].loc, "unknown theory clause '" + kw + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(c.loc, e.what());
    }
  }

  for (const SExpr* c : rules) {
    const SExpr& r = *c;
    bool extended = r.size() == 5 && r[4].is_atom("extended");
    if (r.size() != 4 && !extended) throw ParseError(r.loc, "expected (rule NAME LHS RHS [extended])");
    th.rules.push_back(RewriteRule{atom_of(r[1], "rule name"), parse_term(r[2], th.signature),
                                   parse_term(r[3], th.signature), extended, false, {}});
  }

  for (const SExpr* c : precedences) {
    for (std::size_t k = 1; k < c->size(); ++k) {
      const SExpr& p = (*c)[k];
      if (!p.is_list || p.size() != 3 || !p[1].is_atom(">"))
        throw ParseError(p.loc, "expected (A > B)");
      for (const auto& a : expand_precedence_item(th, p[0]))
        for (const auto& b : expand_precedence_item(th, p[2])) th.declared_precedence.emplace_back(a, b);
    }
  }

  instantiate_schemas(th);
  validate_theory(th);
  return th;
}

// ---------------------------------------------------------------------------
// Composition

Theory compose(const std::vector<Theory>& theories) {
  Theory out;
  std::set<std::string> rule_names;
  for (const auto& th : theories) {
    out.name += (out.name.empty() ? "" : "+") + th.name;
    for (const auto& b : th.base_types)
      if (std::find(out.base_types.begin(), out.base_types.end(), b) == out.base_types.end())
        out.base_types.push_back(b);
    for (const auto& [name, dom] : th.domains) {
      auto [it, inserted] = out.domains.emplace(name, dom);
      if (!inserted && it->second != dom) throw TheoryError("domain clash on '" + name + "'");
    }
    for (const auto& [name, decl] : th.signature.decls()) {
      if (const SymbolDecl* existing = out.signature.find(name)) {
        if (!(*existing == decl)) throw TheoryError("symbol clash on '" + name + "'");
        continue;
      }
      out.signature.declare(decl);
    }
    for (const auto& r : th.rules) {
      if (!r.schema.empty()) continue;
      if (!rule_names.insert(r.name).second) throw TheoryError("rule name clash on '" + r.name + "'");
      out.rules.push_back(r);
    }
    for (const auto& d : th.distributors)
      if (std::find(out.distributors.begin(), out.distributors.end(), d) == out.distributors.end())
        out.distributors.push_back(d);
    for (const auto& p : th.declared_precedence)
      if (std::find(out.declared_precedence.begin(), out.declared_precedence.end(), p) ==
          out.declared_precedence.end())
        out.declared_precedence.push_back(p);
  }
  instantiate_schemas(out);
  validate_theory(out);
  return out;
}

// ---------------------------------------------------------------------------
// Printing and comparison

namespace {

std::string identity_text(const SymbolId& id) {
  if (id.params.empty()) return id.name;
  return "(" + id.name + " " + id.params[0] + ")";
}

} // namespace

std::string theory_to_text(const Theory& t) {
  std::ostringstream os;
  os << "(theory " << t.name << "\n";
  if (!t.base_types.empty()) {
    os << "  (base";
    for (const auto& b : t.base_types) os << " " << b;
    os << ")\n";
  }
  for (const auto& [name, d] : t.domains) {
    os << "  (domain " << name << " (";
    for (std::size_t i = 0; i < d.values.size(); ++i) os << (i ? " " : "") << d.values[i];
    os << "))\n";
  }
  for (const auto& [name, d] : t.signature.decls()) {
    std::string dom = d.param_domain ? " " + d.param_domain->name : "";
    if (d.kind == SymbolKind::Effect) {
      os << "  (effect " << name << dom << " " << d.effect_arity << ")\n";
    } else {
      os << "  (function " << name << dom << " (";
      for (const auto& a : d.arg_types) os << to_string(a) << " ";
      os << "-> " << to_string(*d.result_type) << "))\n";
    }
  }
  for (const auto& d : t.distributors) os << "  (distribute " << d << ")\n";
  for (const auto& r : t.rules) {
    if (!r.schema.empty()) continue;
    os << "  (rule " << r.name << " " << print_term(r.lhs) << " " << print_term(r.rhs)
       << (r.extended ? " extended" : "") << ")\n";
  }
  if (!t.declared_precedence.empty()) {
    os << "  (precedence";
    for (const auto& [a, b] : t.declared_precedence)
      os << " (" << identity_text(a) << " > " << identity_text(b) << ")";
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

namespace {

void first_occurrences(const Term& t, std::vector<std::string>& order) {
  if (t.is(TermKind::Var)) {
    if (std::find(order.begin(), order.end(), t.name()) == order.end()) order.push_back(t.name());
    return;
  }
  for (const auto& c : t.children()) first_occurrences(c, order);
}

/// The rule with its variables renamed by first occurrence in the lhs.
std::pair<Term, Term> normalized_sides(const RewriteRule& r) {
  std::vector<std::string> order;
  first_occurrences(r.lhs, order);
  Bindings b;
  for (std::size_t i = 0; i < order.size(); ++i) b.emplace(order[i], Term::var("%" + std::to_string(i)));
  return {instantiate(r.lhs, b), instantiate(r.rhs, b)};
}

} // namespace

bool equivalent(const Theory& a, const Theory& b) {
  if (a.name != b.name || a.domains != b.domains || !(a.signature == b.signature) ||
      a.distributors != b.distributors)
    return false;
  if (std::set<std::string>(a.base_types.begin(), a.base_types.end()) !=
      std::set<std::string>(b.base_types.begin(), b.base_types.end()))
    return false;
  if (!(a.precedence() == b.precedence())) return false;
  if (a.rules.size() != b.rules.size()) return false;
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    const auto& x = a.rules[i];
    const auto& y = b.rules[i];
    if (x.name != y.name || x.extended != y.extended || x.schema != y.schema ||
        !alpha_eq(x.lhs, y.lhs) || !alpha_eq(x.rhs, y.rhs))
    {
      auto [xl, xr] = normalized_sides(x);
      auto [yl, yr] = normalized_sides(y);
      if (!alpha_eq(xl, yl) || !alpha_eq(xr, yr)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

std::string eff(const std::string& name, const std::string& param, const std::vector<std::string>& args) {
  std::string out = "(eff " + name + " (" + param + ")";
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

std::string fn(const std::string& name, const std::vector<std::string>& args) {
  std::string out = "(fn " + name;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

std::vector<std::string> numbered(const std::string& stem, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

std::string global_state_text(const std::vector<std::string>& domain) {
  if (domain.empty()) throw std::invalid_argument("global-state needs a non-empty value domain");
  std::size_t n = domain.size();
  std::ostringstream os;
  os << "(theory global-state\n  (base B)\n  (domain val (";
  for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << domain[i];
  os << "))\n  (effect assign val 1)\n  (effect get val)\n";
  auto ts = numbered("t", n);
  // assign_i(get(t1..tn)) ~> assign_i(t_i)
  for (std::size_t i = 0; i < n; ++i)
    os << "  (rule assign-get[" << domain[i] << "] " << eff("assign", domain[i], {eff("get", "", ts)})
       << " " << eff("assign", domain[i], {ts[i]}) << ")\n";
  // assign_i(assign_j(s)) ~> assign_j(s)
  for (const auto& i : domain)
    for (const auto& j : domain)
      os << "  (rule assign-assign[" << i << "," << j << "] "
         << eff("assign", i, {eff("assign", j, {"s"})}) << " " << eff("assign", j, {"s"}) << ")\n";
  // get(t1..get(s1..sn)..tn) ~> get(t1..s_i..tn), the inner get at position i
  auto ss = numbered("s", n);
  for (std::size_t i = 0; i < n; ++i) {
    auto lhs_args = ts;
    lhs_args[i] = eff("get", "", ss);
    auto rhs_args = ts;
    rhs_args[i] = ss[i];
    os << "  (rule get-get[" << domain[i] << "] " << eff("get", "", lhs_args) << " "
       << eff("get", "", rhs_args) << ")\n";
  }
  os << ")\n";
  return os.str();
}

std::string nondet_text() {
  return "(theory nondet\n"
         "  (base B)\n"
         "  (effect or 2)\n"
         "  (rule or-assoc (eff or () (eff or () s1 s2) s3) (eff or () s1 (eff or () s2 s3))))\n";
}

std::string par_text(const std::vector<std::string>& effects) {
  std::ostringstream os;
  os << "(theory par\n  (base B P)\n  (effect par 2)\n  (effect join 1)\n";
  for (const auto& e : effects) os << "  (effect " << e << " 1)\n";
  os << "  (function pair (B B -> P))\n"
        "  (distribute par)\n"
        "  (rule join-par (eff join () (eff par () (pure v) (pure w))) (pure (fn pair v w)) extended))\n";
  return os.str();
}

std::string retry_text(std::size_t successes) {
  auto ss = numbered("s", successes);
  std::vector<std::string> req_args{"t"};
  req_args.insert(req_args.end(), ss.begin(), ss.end());
  std::string request = eff("request", "", req_args);
  std::vector<std::string> outer{fn("retry", {"u", request})};
  outer.insert(outer.end(), ss.begin(), ss.end());
  std::ostringstream os;
  os << "(theory retry\n  (base B Nat)\n"
     << "  (effect request " << successes + 1 << ")\n"
     << "  (function retry (Nat (E B) -> (E B)))\n"
     << "  (function zero (-> Nat))\n"
     << "  (function succ (Nat -> Nat))\n"
     << "  (rule retry-zero " << fn("retry", {fn("zero", {}), request}) << " t)\n"
     << "  (rule retry-succ " << fn("retry", {fn("succ", {"u"}), request}) << " "
     << eff("request", "", outer) << ")\n"
     << "  (precedence (retry > request)))\n";
  return os.str();
}

std::string peano_text() {
  return "(theory peano\n"
         "  (base Nat)\n"
         "  (function zero (-> Nat))\n"
         "  (function succ (Nat -> Nat))\n"
         "  (function plus (Nat Nat -> Nat))\n"
         "  (rule plus-zero (fn plus x (fn zero)) x)\n"
         "  (rule plus-succ (fn plus x (fn succ y)) (fn succ (fn plus x y)))\n"
         "  (precedence (plus > succ)))\n";
}

} // namespace

std::vector<std::string> builtin_names() { return {"global-state", "nondet", "par", "retry", "peano"}; }

Theory builtin(const std::string& name, const BuiltinOptions& options) {
  if (name == "global-state") return load_theory(global_state_text(options.state_domain));
  if (name == "nondet") return load_theory(nondet_text());
  if (name == "par") return load_theory(par_text(options.par_effects));
  if (name == "retry") return load_theory(retry_text(options.request_successes));
  if (name == "peano") return load_theory(peano_text());
  throw std::invalid_argument("unknown builtin theory '" + name + "'");
}

Term peano_numeral(std::size_t n) {
  Term t = Term::sym(SymbolKind::Function, "zero", {}, {});
  for (std::size_t i = 0; i < n; ++i) t = Term::sym(SymbolKind::Function, "succ", {}, {t});
  return t;
}

std::optional<std::size_t> peano_value(const Term& t) {
  std::size_t n = 0;
  const Term* cur = &t;
  while (cur->is(TermKind::Sym) && cur->name() == "succ" && cur->arity() == 1) {
    ++n;
    cur = &cur->child(0);
  }
  if (cur->is(TermKind::Sym) && cur->name() == "zero" && cur->arity() == 0) return n;
  return std::nullopt;
}

} // namespace effrw
