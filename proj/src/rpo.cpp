#include "effrw/rpo.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "effrw/kernel.hpp"

namespace effrw {

// ---------------------------------------------------------------------------
// Precedence

Precedence::Precedence(const std::vector<Pair>& pairs) : generators_(pairs) {
  closure_.insert(pairs.begin(), pairs.end());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Pair> add;
    for (const auto& [a, b] : closure_)
      for (auto it = closure_.lower_bound(Pair{b, SymbolId{}}); it != closure_.end() && it->first == b; ++it)
        if (!closure_.count(Pair{a, it->second})) add.emplace_back(a, it->second);
    for (auto& p : add) grew = closure_.insert(std::move(p)).second || grew;
  }
  for (const auto& [a, b] : closure_)
    if (a == b) throw std::invalid_argument("precedence is cyclic through " + to_string(a));
}

bool Precedence::greater(const SymbolId& a, const SymbolId& b) const {
  return closure_.count(Pair{a, b}) != 0;
}

std::string to_string(const Precedence& p) {
  if (p.generators().empty()) return "(empty)";
  std::string out;
  for (const auto& [a, b] : p.generators()) {
    if (!out.empty()) out += ", ";
    out += to_string(a) + " > " + to_string(b);
  }
  return out;
}

std::string to_string(RpoCase c) {
  switch (c) {
  case RpoCase::Lex: return "case-1-lex";
  case RpoCase::Precedence: return "case-2-precedence";
  case RpoCase::Subterm: return "case-3-subterm";
  case RpoCase::Equal: return "refl-eq";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Decision procedure

namespace {

std::vector<Term> args_of(const Term& t) { return {t.children().begin(), t.children().end()}; }

void require_symbolic(const Term& t) {
  if (!is_symbolic(t))
    throw NonSymbolicTerm("RPO is only defined on symbols and variables: " + print_term(t));
}

} // namespace

bool RpoSolver::decide(const Term& s, const Term& t) {
  if (!s.is(TermKind::Sym)) return false;
  auto key = std::make_pair(print_term(s), print_term(t));
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  bool result = false;
  // (3) some immediate argument is >= t
  for (const auto& si : s.children())
    if (syntactically_equal(si, t) || decide(si, t)) {
      result = true;
      break;
    }

  if (!result && t.is(TermKind::Sym)) {
    auto dominates_args = [&] {
      for (const auto& tj : t.children())
        if (!decide(s, tj)) return false;
      return true;
    };
    if (s.symbol() == t.symbol() && s.arity() == t.arity()) {
      // (1) same symbol, lexicographic descent
      result = lex_greater(args_of(s), args_of(t)) && dominates_args();
    } else if (prec_.greater(s.symbol(), t.symbol())) {
      // (2) precedence descent
      result = dominates_args();
    } else if (s.symbol() != t.symbol() && dominates_args()) {
      missing_.emplace(s.symbol(), t.symbol());
    }
  }
  memo_.emplace(std::move(key), result);
  return result;
}

bool RpoSolver::lex_greater(const std::vector<Term>& ss, const std::vector<Term>& ts) {
  if (ss.size() != ts.size())
    throw std::invalid_argument("lexicographic comparison of sequences of different length");
  for (std::size_t i = 0; i < ss.size(); ++i)
    if (!syntactically_equal(ss[i], ts[i])) return decide(ss[i], ts[i]);
  return false;
}

bool RpoSolver::holds(const Term& s, const Term& t) {
  require_symbolic(s);
  require_symbolic(t);
  return decide(s, t);
}

RpoDerivation RpoSolver::build(const Term& s, const Term& t) {
  for (const auto& si : s.children()) {
    if (syntactically_equal(si, t))
      return RpoDerivation{s, t, RpoCase::Subterm, {RpoDerivation{si, t, RpoCase::Equal, {}}}};
    if (decide(si, t)) return RpoDerivation{s, t, RpoCase::Subterm, {build(si, t)}};
  }
  RpoDerivation d{s, t, RpoCase::Precedence, {}};
  if (s.symbol() == t.symbol() && s.arity() == t.arity()) {
    d.rule = RpoCase::Lex;
    for (std::size_t i = 0; i < s.arity(); ++i)
      if (!syntactically_equal(s.child(i), t.child(i))) {
        d.children.push_back(build(s.child(i), t.child(i)));
        break;
      }
  }
  for (const auto& tj : t.children()) d.children.push_back(build(s, tj));
  return d;
}

std::optional<RpoDerivation> RpoSolver::greater(const Term& s, const Term& t) {
  if (!holds(s, t)) return std::nullopt;
  return build(s, t);
}

std::optional<RpoDerivation> RpoSolver::geq(const Term& s, const Term& t) {
  require_symbolic(s);
  require_symbolic(t);
  if (syntactically_equal(s, t)) return RpoDerivation{s, t, RpoCase::Equal, {}};
  return greater(s, t);
}

std::optional<RpoDerivation> rpo_greater(const Precedence& prec, const Term& s, const Term& t) {
  RpoSolver solver(prec);
  return solver.greater(s, t);
}

std::optional<RpoDerivation> rpo_geq(const Precedence& prec, const Term& s, const Term& t) {
  RpoSolver solver(prec);
  return solver.geq(s, t);
}

bool lex_greater(const Precedence& prec, const std::vector<Term>& ss, const std::vector<Term>& ts) {
  for (const auto& t : ss) require_symbolic(t);
  for (const auto& t : ts) require_symbolic(t);
  RpoSolver solver(prec);
  return solver.lex_greater(ss, ts);
}

// ---------------------------------------------------------------------------
// Replay

namespace {

bool replay_strict(const Precedence& prec, const RpoDerivation& d);

bool replay_geq(const Precedence& prec, const RpoDerivation& d) {
  if (d.rule == RpoCase::Equal) return d.children.empty() && syntactically_equal(d.lhs, d.rhs);
  return replay_strict(prec, d);
}

bool replay_dominates(const Precedence& prec, const RpoDerivation& d, std::size_t first) {
  if (d.children.size() != first + d.rhs.arity()) return false;
  for (std::size_t j = 0; j < d.rhs.arity(); ++j) {
    const auto& c = d.children[first + j];
    if (!syntactically_equal(c.lhs, d.lhs) || !syntactically_equal(c.rhs, d.rhs.child(j)))
      return false;
    if (!replay_strict(prec, c)) return false;
  }
  return true;
}

bool replay_strict(const Precedence& prec, const RpoDerivation& d) {
  if (!d.lhs.is(TermKind::Sym)) return false;
  switch (d.rule) {
  case RpoCase::Equal: return false;
  case RpoCase::Subterm: {
    if (d.children.size() != 1) return false;
    const auto& c = d.children[0];
    if (!syntactically_equal(c.rhs, d.rhs)) return false;
    bool is_arg = std::any_of(d.lhs.children().begin(), d.lhs.children().end(),
                              [&](const Term& si) { return syntactically_equal(si, c.lhs); });
    return is_arg && replay_geq(prec, c);
  }
  case RpoCase::Lex: {
    const Term& s = d.lhs;
    const Term& t = d.rhs;
    if (!t.is(TermKind::Sym) || s.symbol() != t.symbol() || s.arity() != t.arity()) return false;
    std::size_t i = 0;
    while (i < s.arity() && syntactically_equal(s.child(i), t.child(i))) ++i;
    if (i == s.arity() || d.children.empty()) return false;
    const auto& c = d.children[0];
    if (!syntactically_equal(c.lhs, s.child(i)) || !syntactically_equal(c.rhs, t.child(i)))
      return false;
    return replay_strict(prec, c) && replay_dominates(prec, d, 1);
  }
  case RpoCase::Precedence:
    if (!d.rhs.is(TermKind::Sym) || !prec.greater(d.lhs.symbol(), d.rhs.symbol())) return false;
    return replay_dominates(prec, d, 0);
  }
  return false;
}

void collect_cases(const RpoDerivation& d, std::set<RpoCase>& out) {
  out.insert(d.rule);
  for (const auto& c : d.children) collect_cases(c, out);
}

} // namespace

bool replay_derivation(const Precedence& prec, const RpoDerivation& d) {
  return replay_geq(prec, d);
}

std::set<RpoCase> cases_used(const RpoDerivation& d) {
  std::set<RpoCase> out;
  collect_cases(d, out);
  return out;
}

// ---------------------------------------------------------------------------
// Certification

std::string to_string(CertStatus s) {
  switch (s) {
  case CertStatus::Certified: return "certified";
  case CertStatus::RefusedExtended: return "refused-extended";
  case CertStatus::Failed: return "failed";
  }
  return {};
}

namespace {

CertReport certify_with(RpoSolver& solver, const std::vector<RewriteRule>& rules) {
  CertReport report;
  report.overall = true;
  for (const auto& rule : rules) {
    RuleCertificate cert{rule.name, CertStatus::Failed, std::nullopt, {}};
    if (rule.extended) {
      cert.status = CertStatus::RefusedExtended;
      cert.reason = "extended rules are outside the symbolic fragment";
      report.rules.push_back(std::move(cert));
      continue;
    }
    try {
      validate_rule(rule);
      if (auto d = solver.greater(rule.lhs, rule.rhs)) {
        cert.status = CertStatus::Certified;
        cert.derivation = std::move(d);
      } else {
        cert.reason = "no RPO derivation for lhs > rhs";
      }
    } catch (const std::invalid_argument& e) {
      cert.reason = e.what();
    }
    if (cert.status != CertStatus::Certified) report.overall = false;
    report.rules.push_back(std::move(cert));
  }
  return report;
}

void derivation_text(const RpoDerivation& d, int depth, std::string& out) {
  out += std::string(2 * depth, ' ') + to_string(d.rule) + ": " + print_term(d.lhs) +
         (d.rule == RpoCase::Equal ? " = " : " > ") + print_term(d.rhs) + "\n";
  for (const auto& c : d.children) derivation_text(c, depth + 1, out);
}

nlohmann::json derivation_json(const RpoDerivation& d) {
  nlohmann::json j{{"case", to_string(d.rule)}, {"lhs", print_term(d.lhs)}, {"rhs", print_term(d.rhs)}};
  j["children"] = nlohmann::json::array();
  for (const auto& c : d.children) j["children"].push_back(derivation_json(c));
  return j;
}

} // namespace

CertReport certify_ruleset(const Precedence& prec, const std::vector<RewriteRule>& rules) {
  RpoSolver solver(prec);
  return certify_with(solver, rules);
}

std::string derivation_to_text(const RpoDerivation& d) {
  std::string out;
  derivation_text(d, 0, out);
  return out;
}

std::string report_to_text(const CertReport& r) {
  std::string out;
  for (const auto& c : r.rules) {
    out += "rule " + c.rule + ": " + to_string(c.status);
    if (!c.reason.empty()) out += " (" + c.reason + ")";
    out += "\n";
    if (c.derivation) {
      std::string d = derivation_to_text(*c.derivation);
      std::istringstream lines(d);
      for (std::string line; std::getline(lines, line);) out += "  " + line + "\n";
    }
  }
  out += std::string("overall: ") + (r.overall ? "certified" : "not certified") + "\n";
  return out;
}

std::string report_to_json(const CertReport& r) {
  nlohmann::json j;
  j["overall"] = r.overall;
  j["rules"] = nlohmann::json::array();
  for (const auto& c : r.rules) {
    nlohmann::json rj{{"name", c.rule}, {"status", to_string(c.status)}};
    if (!c.reason.empty()) rj["reason"] = c.reason;
    rj["derivation"] = c.derivation ? derivation_json(*c.derivation) : nlohmann::json(nullptr);
    j["rules"].push_back(std::move(rj));
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Precedence search

namespace {

void collect_symbols(const Term& t, std::set<SymbolId>& out) {
  if (t.is(TermKind::Sym)) out.insert(t.symbol());
  for (const auto& c : t.children()) collect_symbols(c, out);
}

std::optional<Precedence> make_precedence(const std::vector<Precedence::Pair>& pairs) {
  try {
    return Precedence(pairs);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

} // namespace

std::optional<Precedence> search_precedence(const std::vector<RewriteRule>& rules,
                                            std::size_t symbol_bound) {
  std::vector<RewriteRule> checked;
  std::set<SymbolId> symbols;
  for (const auto& r : rules) {
    if (r.extended) continue;
    collect_symbols(r.lhs, symbols);
    collect_symbols(r.rhs, symbols);
    checked.push_back(r);
  }
  if (symbols.size() > symbol_bound)
    throw SearchBoundExceeded("precedence search over " + std::to_string(symbols.size()) +
                              " symbols exceeds the bound of " + std::to_string(symbol_bound));
  for (const auto& r : checked) {
    try {
      validate_rule(r);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }

  auto passes = [&](const Precedence& p) { return certify_ruleset(p, checked).overall; };

  std::optional<std::vector<Precedence::Pair>> found;

  // Constraint-guided search: extend by one harvested pair at a time.
  std::set<std::vector<Precedence::Pair>> visited;
  std::size_t budget = 4096;
  std::function<bool(std::vector<Precedence::Pair>)> dfs = [&](std::vector<Precedence::Pair> pairs) {
    std::sort(pairs.begin(), pairs.end());
    if (!visited.insert(pairs).second || budget == 0) return false;
    --budget;
    auto prec = make_precedence(pairs);
    if (!prec) return false;
    RpoSolver solver(*prec);
    if (certify_with(solver, checked).overall) {
      found = pairs;
      return true;
    }
    for (const auto& cand : solver.missing_precedences()) {
      if (!symbols.count(cand.first) || !symbols.count(cand.second)) continue;
      if (prec->greater(cand.first, cand.second) || prec->greater(cand.second, cand.first)) continue;
      auto next = pairs;
      next.push_back(cand);
      if (dfs(std::move(next))) return true;
    }
    return false;
  };
  dfs({});

  // Fallback: every total order. The ordering is monotone in the
  // precedence, so if any order works some total order does.
  if (!found) {
    std::vector<SymbolId> perm(symbols.begin(), symbols.end());
    do {
      std::vector<Precedence::Pair> chain;
      for (std::size_t i = 0; i + 1 < perm.size(); ++i) chain.emplace_back(perm[i], perm[i + 1]);
      if (passes(Precedence(chain))) {
        found = std::vector<Precedence::Pair>(Precedence(chain).pairs().begin(),
                                              Precedence(chain).pairs().end());
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  if (!found) return std::nullopt;

  // Drop generators that are not needed.
  std::vector<Precedence::Pair> gens = *found;
  std::sort(gens.begin(), gens.end());
  for (std::size_t i = 0; i < gens.size();) {
    auto trial = gens;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    auto p = make_precedence(trial);
    if (p && passes(*p))
      gens = std::move(trial);
    else
      ++i;
  }
  return Precedence(gens);
}

} // namespace effrw
