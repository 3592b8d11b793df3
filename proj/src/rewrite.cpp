#include "effrw/rewrite.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"

#include "effrw/kernel.hpp"

namespace effrw {

namespace {

bool in_rule_fragment(const Term& t, bool extended) {
  switch (t.kind()) {
  case TermKind::Var: return true;
  case TermKind::Pure:
    if (!extended) return false;
    [[fallthrough]];
  case TermKind::Sym:
    for (const auto& c : t.children())
      if (!in_rule_fragment(c, extended)) return false;
    return true;
  default: return false;
  }
}

} // namespace

void validate_rule(const RewriteRule& rule) {
  const char* fragment = rule.extended ? "symbols, variables and pure" : "symbols and variables";
  if (!in_rule_fragment(rule.lhs, rule.extended))
    throw std::invalid_argument("rule '" + rule.name + "': left-hand side may only use " + fragment);
  if (!in_rule_fragment(rule.rhs, rule.extended))
    throw std::invalid_argument("rule '" + rule.name + "': right-hand side may only use " + fragment);
  if (rule.lhs.is(TermKind::Var))
    throw std::invalid_argument("rule '" + rule.name + "': left-hand side is a bare variable");
  auto lv = free_vars(rule.lhs);
  for (const auto& v : free_vars(rule.rhs))
    if (!lv.count(v))
      throw std::invalid_argument("rule '" + rule.name + "': variable '" + v +
                                  "' occurs on the right-hand side only");
}

std::string to_string(const Position& p) {
  if (p.empty()) return "root";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(p[i]);
  }
  return out;
}

const Term& subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::size_t i : p) {
    if (i >= cur->arity()) throw std::out_of_range("position " + to_string(p) + " not in term");
    cur = &cur->child(i);
  }
  return *cur;
}

namespace {

Term replace_rec(const Term& t, const Position& p, std::size_t depth, const Term& replacement) {
  if (depth == p.size()) return replacement;
  if (p[depth] >= t.arity()) throw std::out_of_range("position " + to_string(p) + " not in term");
  std::vector<Term> kids(t.children().begin(), t.children().end());
  kids[p[depth]] = replace_rec(kids[p[depth]], p, depth + 1, replacement);
  return t.with_children(std::move(kids));
}

} // namespace

Term replace_at(const Term& t, const Position& p, const Term& replacement) {
  return replace_rec(t, p, 0, replacement);
}

bool is_ml_rule(const std::string& rule) {
  return rule == ml_rule::abs_beta || rule == ml_rule::let_beta || rule == ml_rule::let_assoc ||
         rule == ml_rule::eff_assoc;
}

std::optional<Term> contract_ml(const Term& t, std::string* rule_name) {
  auto named = [&](const char* n, Term r) {
    if (rule_name) *rule_name = n;
    return std::optional<Term>(std::move(r));
  };
  if (t.is(TermKind::App) && t.child(0).is(TermKind::Lam)) {
    const Term& lam = t.child(0);
    return named(ml_rule::abs_beta, substitute(lam.child(0), lam.name(), t.child(1)));
  }
  if (!t.is(TermKind::Let)) return std::nullopt;
  const Term& subject = t.child(0);
  const Term& body = t.child(1);
  switch (subject.kind()) {
  case TermKind::Pure:
    return named(ml_rule::let_beta, substitute(body, t.name(), subject.child(0)));
  case TermKind::Let: {
    // let y <= (let x <= t1 in t2) in u  ~>  let x <= t1 in (let y <= t2 in u)
    std::string inner = subject.name();
    Term t1 = subject.child(0);
    Term t2 = subject.child(1);
    if (occurs_free(inner, body)) {
      std::set<std::string> avoid = free_vars(body);
      auto fv2 = free_vars(t2);
      avoid.insert(fv2.begin(), fv2.end());
      avoid.insert(t.name());
      std::string renamed = fresh_name(inner, avoid);
      t2 = substitute(t2, inner, Term::var(renamed));
      inner = renamed;
    }
    return named(ml_rule::let_assoc, Term::let(inner, t1, Term::let(t.name(), t2, body)));
  }
  case TermKind::Sym: {
    if (!subject.is_effect()) return std::nullopt;
    std::vector<Term> args;
    args.reserve(subject.arity());
    for (const auto& a : subject.children()) args.push_back(Term::let(t.name(), a, body));
    return named(ml_rule::eff_assoc, subject.with_children(std::move(args)));
  }
  default: return std::nullopt;
  }
}

namespace {

bool match_rec(const Term& p, const Term& s, Bindings& b) {
  switch (p.kind()) {
  case TermKind::Var: {
    auto [it, inserted] = b.emplace(p.name(), s);
    return inserted || alpha_eq(it->second, s);
  }
  case TermKind::Sym:
    if (!s.is(TermKind::Sym) || s.name() != p.name() || s.params() != p.params() ||
        s.symbol_kind() != p.symbol_kind() || s.arity() != p.arity())
      return false;
    break;
  case TermKind::Pure:
    if (!s.is(TermKind::Pure)) return false;
    break;
  default: return false;
  }
  for (std::size_t i = 0; i < p.arity(); ++i)
    if (!match_rec(p.child(i), s.child(i), b)) return false;
  return true;
}

struct Collector {
  const Term& root;
  const std::vector<RewriteRule>* rules;
  bool want_ml;
  std::vector<Redex> out;
  Position path;

  void visit(const Term& t) {
    if (want_ml) {
      std::string name;
      if (auto c = contract_ml(t, &name)) out.push_back(Redex{path, name, replace_at(root, path, *c)});
    }
    if (rules && t.is(TermKind::Sym)) {
      for (const auto& rule : *rules) {
        if (auto b = match_pattern(rule.lhs, t))
          out.push_back(Redex{path, rule.name, replace_at(root, path, instantiate(rule.rhs, *b))});
      }
    }
    for (std::size_t i = 0; i < t.arity(); ++i) {
      path.push_back(i);
      visit(t.child(i));
      path.pop_back();
    }
  }
};

} // namespace

std::optional<Bindings> match_pattern(const Term& pattern, const Term& subject) {
  Bindings b;
  if (!match_rec(pattern, subject, b)) return std::nullopt;
  return b;
}

Term instantiate(const Term& pattern, const Bindings& b) {
  if (pattern.is(TermKind::Var)) {
    auto it = b.find(pattern.name());
    if (it == b.end()) throw std::invalid_argument("unbound pattern variable '" + pattern.name() + "'");
    return it->second;
  }
  std::vector<Term> kids;
  kids.reserve(pattern.arity());
  for (const auto& c : pattern.children()) kids.push_back(instantiate(c, b));
  return pattern.with_children(std::move(kids));
}

std::vector<Redex> ml_redexes(const Term& t) {
  Collector c{t, nullptr, true, {}, {}};
  c.visit(t);
  return std::move(c.out);
}

std::vector<Redex> symbolic_redexes(const Term& t, const std::vector<RewriteRule>& rules) {
  Collector c{t, &rules, false, {}, {}};
  c.visit(t);
  return std::move(c.out);
}

std::vector<Redex> all_redexes(const Term& t, const std::vector<RewriteRule>& rules) {
  // Pre-order traversal already yields positions in lexicographic order.
  Collector c{t, &rules, true, {}, {}};
  c.visit(t);
  return std::move(c.out);
}

Term step(const Term& t, const Redex& r, const std::vector<RewriteRule>& rules) {
  for (const auto& candidate : all_redexes(t, rules))
    if (candidate.position == r.position && candidate.rule == r.rule &&
        alpha_eq(candidate.reduct, r.reduct))
      return candidate.reduct;
  throw StaleRedex("redex " + r.rule + " @ " + to_string(r.position) + " does not belong to term");
}

std::string to_string(const Strategy& s) {
  switch (s.kind) {
  case Strategy::Kind::LeftmostOutermost: return "leftmost-outermost";
  case Strategy::Kind::RightmostInnermost: return "rightmost-innermost";
  case Strategy::Kind::Random: return "random(" + std::to_string(s.seed) + ")";
  }
  return {};
}

NormalizeResult normalize(const Term& t, const std::vector<RewriteRule>& rules, Strategy strategy,
                          std::size_t fuel) {
  std::mt19937_64 rng(strategy.seed);
  Trace trace{t, {}};
  Term cur = t;
  for (;;) {
    auto redexes = all_redexes(cur, rules);
    if (redexes.empty()) return NormalizeResult{cur, std::move(trace), false};
    if (trace.steps.size() >= fuel) return NormalizeResult{cur, std::move(trace), true};
    std::size_t pick = 0;
    switch (strategy.kind) {
    case Strategy::Kind::LeftmostOutermost: break;
    case Strategy::Kind::RightmostInnermost: {
      const Position& last = redexes.back().position;
      pick = redexes.size() - 1;
      while (pick > 0 && redexes[pick - 1].position == last) --pick;
      break;
    }
    case Strategy::Kind::Random: pick = static_cast<std::size_t>(rng() % redexes.size()); break;
    }
    cur = redexes[pick].reduct;
    trace.steps.push_back(std::move(redexes[pick]));
  }
}

namespace {

struct Expansion {
  std::vector<Redex> redexes;
  std::vector<std::size_t> hashes;
};

Expansion expand(const Term& t, const std::vector<RewriteRule>& rules) {
  Expansion e;
  e.redexes = all_redexes(t, rules);
  e.hashes.reserve(e.redexes.size());
  for (const auto& r : e.redexes) e.hashes.push_back(alpha_hash(r.reduct));
  return e;
}

void analyse(ReductionGraph& g) {
  std::size_t n = g.nodes.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& e : g.edges) {
    succ[e.from].push_back(e.to);
    ++indegree[e.to];
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    std::size_t v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (std::size_t w : succ[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  g.acyclic = order.size() == n;
  if (!g.acyclic || g.truncated) return;
  std::vector<std::size_t> depth(n, 0);
  std::size_t longest = 0;
  for (std::size_t v : order)
    for (std::size_t w : succ[v]) {
      depth[w] = std::max(depth[w], depth[v] + 1);
      longest = std::max(longest, depth[w]);
    }
  // Every node is reachable from node 0, so the deepest node bounds the
  // longest path from the start term.
  g.longest_path = longest;
}

} // namespace

ReductionGraph reduction_graph(const Term& t, const std::vector<RewriteRule>& rules,
                               std::size_t fuel, unsigned workers) {
  ReductionGraph g;
  // alpha_hash buckets; membership is confirmed with alpha_eq.
  std::unordered_multimap<std::size_t, std::size_t> index;
  g.nodes.push_back(t);
  index.emplace(alpha_hash(t), 0);
  auto lookup = [&](std::size_t h, const Term& term) -> std::optional<std::size_t> {
    auto [lo, hi] = index.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (alpha_eq(g.nodes[it->second], term)) return it->second;
    return std::nullopt;
  };
  std::vector<std::size_t> frontier{0};
  workers = std::max(1u, workers);

  while (!frontier.empty() && !g.truncated) {
    std::vector<Expansion> results(frontier.size());
    if (workers == 1 || frontier.size() < 2) {
      for (std::size_t i = 0; i < frontier.size(); ++i) results[i] = expand(g.nodes[frontier[i]], rules);
    } else {
      std::vector<std::thread> pool;
      unsigned n = std::min<std::size_t>(workers, frontier.size());
      for (unsigned w = 0; w < n; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < frontier.size(); i += n)
            results[i] = expand(g.nodes[frontier[i]], rules);
        });
      for (auto& th : pool) th.join();
    }

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size() && !g.truncated; ++i) {
      std::size_t from = frontier[i];
      auto& ex = results[i];
      if (ex.redexes.empty()) g.normal_forms.push_back(from);
      for (std::size_t k = 0; k < ex.redexes.size(); ++k) {
        std::size_t to;
        if (auto found = lookup(ex.hashes[k], ex.redexes[k].reduct)) {
          to = *found;
        } else {
          if (g.nodes.size() >= fuel) {
            g.truncated = true;
            break;
          }
          to = g.nodes.size();
          g.nodes.push_back(ex.redexes[k].reduct);
          index.emplace(ex.hashes[k], to);
          next.push_back(to);
        }
        g.edges.push_back(GraphEdge{from, to, std::move(ex.redexes[k].rule),
                                    std::move(ex.redexes[k].position)});
      }
    }
    frontier = std::move(next);
  }
  std::sort(g.normal_forms.begin(), g.normal_forms.end());
  analyse(g);
  return g;
}

namespace {

std::size_t nesting_rec(const Term& t, bool in_subject) {
  std::size_t n = in_subject && t.is(TermKind::Let) ? 1 : 0;
  auto kids = t.children();
  for (std::size_t i = 0; i < kids.size(); ++i)
    n += nesting_rec(kids[i], in_subject || (t.is(TermKind::Let) && i == 0));
  return n;
}

} // namespace

std::size_t left_nesting_measure(const Term& t) { return nesting_rec(t, false); }

std::string trace_to_text(const Trace& trace) {
  std::string out;
  for (const auto& s : trace.steps)
    out += s.rule + " @ " + to_string(s.position) + " : " + print_term(s.reduct) + "\n";
  return out;
}

std::string trace_to_json(const Trace& trace) {
  nlohmann::json j;
  j["initial"] = print_term(trace.initial);
  j["steps"] = nlohmann::json::array();
  for (const auto& s : trace.steps)
    j["steps"].push_back({{"rule", s.rule}, {"position", s.position}, {"term", print_term(s.reduct)}});
  j["final"] = print_term(trace.final_term());
  return j.dump(2) + "\n";
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

} // namespace

std::string graph_to_dot(const ReductionGraph& g) {
  std::ostringstream os;
  os << "digraph reductions {\n";
  std::vector<bool> normal(g.nodes.size(), false);
  for (auto i : g.normal_forms) normal[i] = true;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    os << "  n" << i << " [label=\"" << dot_escape(print_term(g.nodes[i])) << "\"";
    if (normal[i]) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& e : g.edges)
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << dot_escape(e.rule) << "\"];\n";
  os << "}\n";
  return os.str();
}

} // namespace effrw
