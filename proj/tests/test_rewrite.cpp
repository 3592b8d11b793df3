#include "doctest.h"

#include <algorithm>
#include <functional>
#include <set>

#include "effrw/kernel.hpp"
#include "effrw/rewrite.hpp"
#include "effrw/theory.hpp"
#include "support/generators.hpp"

using namespace effrw;

namespace {

Term v(const char* n) { return Term::var(n); }
Term pv(const char* n) { return Term::pure(Term::var(n)); }
Term eff(const std::string& name, std::vector<Term> args, std::vector<std::string> params = {}) {
  return Term::sym(SymbolKind::Effect, name, std::move(params), std::move(args));
}
Term fn(const std::string& name, std::vector<Term> args) {
  return Term::sym(SymbolKind::Function, name, {}, std::move(args));
}

std::vector<std::string> rule_names(const std::vector<Redex>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.rule);
  return out;
}

} // namespace

TEST_CASE("metalanguage redexes") {
  SUBCASE("let-beta") {
    auto rs = ml_redexes(Term::let("x", pv("v"), Term::pure(v("x"))));
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].rule == ml_rule::let_beta);
    CHECK(rs[0].position.empty());
    CHECK(syntactically_equal(rs[0].reduct, pv("v")));
  }
  SUBCASE("eff-assoc pushes the continuation into every argument") {
    Term u = Term::pure(fn("f", {v("x")}));
    auto rs = ml_redexes(Term::let("x", eff("e", {pv("a"), pv("b")}), u));
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].rule == ml_rule::eff_assoc);
    CHECK(syntactically_equal(rs[0].reduct, eff("e", {Term::let("x", pv("a"), u), Term::let("x", pv("b"), u)})));
  }
  SUBCASE("eff-assoc ignores function symbols") {
    auto rs = ml_redexes(Term::let("x", fn("f", {pv("a")}), Term::pure(v("x"))));
    CHECK(rs.empty());
  }
  SUBCASE("abs-beta substitutes the argument into the body") {
    auto rs = ml_redexes(Term::app(Term::lam("x", Term::pure(v("x"))), v("a")));
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].rule == ml_rule::abs_beta);
    CHECK(syntactically_equal(rs[0].reduct, pv("a")));
  }
  SUBCASE("let-assoc renames a binder that would capture") {
    // let y <= (let x <= t1 in t2) in u, where x is free in u
    Term t = Term::let("y", Term::let("x", v("t1"), v("t2")), Term::app(v("x"), v("y")));
    auto rs = ml_redexes(t);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].rule == ml_rule::let_assoc);
    const Term& r = rs[0].reduct;
    REQUIRE(r.is(TermKind::Let));
    CHECK(r.name() != "x");
    CHECK(alpha_eq(r, Term::let("z", v("t1"), Term::let("y", v("t2"), Term::app(v("x"), v("y"))))));
  }
  SUBCASE("let-assoc renaming also respects the inner body") {
    Term t = Term::let("y", Term::let("x", v("t1"), Term::app(v("x"), v("x"))), Term::app(v("x"), v("y")));
    auto rs = ml_redexes(t);
    REQUIRE(rs.size() == 1);
    CHECK(alpha_eq(rs[0].reduct, Term::let("z", v("t1"), Term::let("y", Term::app(v("z"), v("z")),
                                                                    Term::app(v("x"), v("y"))))));
  }
  SUBCASE("redexes are found under binders and in every argument") {
    Term beta = Term::app(Term::lam("x", v("x")), v("a"));
    Term t = Term::lam("q", eff("e", {Term::pure(beta), Term::let("z", pv("b"), Term::pure(beta))}));
    auto rs = ml_redexes(t);
    std::vector<std::string> positions;
    for (const auto& r : rs) positions.push_back(to_string(r.position));
    CHECK(positions == std::vector<std::string>{"0.0.0", "0.1", "0.1.1.0"});
  }
}

TEST_CASE("pattern matching") {
  Term pattern = eff("or", {eff("or", {v("s1"), v("s2")}), v("s3")});
  auto m = match_pattern(pattern, eff("or", {eff("or", {pv("a"), pv("b")}), pv("c")}));
  REQUIRE(m);
  CHECK(m->size() == 3);
  CHECK(syntactically_equal(m->at("s1"), pv("a")));
  CHECK(syntactically_equal(m->at("s3"), pv("c")));

  Term nonlinear = eff("or", {v("x"), v("x")});
  CHECK_FALSE(match_pattern(nonlinear, eff("or", {pv("a"), pv("b")})));
  CHECK(match_pattern(nonlinear, eff("or", {Term::lam("p", v("p")), Term::lam("q", v("q"))})));

  auto any = match_pattern(v("x"), Term::lam("y", v("y")));
  REQUIRE(any);
  CHECK(any->at("x").is(TermKind::Lam));

  CHECK_FALSE(match_pattern(eff("e", {v("x")}, {"0"}), eff("e", {pv("a")}, {"1"})));
  CHECK_FALSE(match_pattern(Term::pure(v("x")), v("y")));
}

TEST_CASE("rule validation") {
  CHECK_THROWS_AS(validate_rule({"bare", v("x"), v("x")}), std::invalid_argument);
  CHECK_THROWS_AS(validate_rule({"rhs-only", eff("e", {v("x")}), v("y")}), std::invalid_argument);
  CHECK_THROWS_AS(validate_rule({"pure", eff("e", {v("x")}), Term::pure(v("x"))}), std::invalid_argument);
  CHECK_NOTHROW(validate_rule({"pure", eff("e", {v("x")}), Term::pure(v("x")), true}));
  CHECK_THROWS_AS(validate_rule({"lam", eff("e", {v("x")}), Term::lam("y", v("x")), true}), std::invalid_argument);
  CHECK_NOTHROW(validate_rule({"ok", eff("e", {v("x"), v("y")}), v("y")}));
}

TEST_CASE("symbolic redexes") {
  BuiltinOptions opts;
  opts.state_domain = {"1", "2"};
  Theory gs = builtin("global-state", opts);
  auto rs = symbolic_redexes(eff("assign", {eff("assign", {pv("a")}, {"1"})}, {"2"}), gs.rules);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].rule == "assign-assign[2,1]");
  CHECK(syntactically_equal(rs[0].reduct, eff("assign", {pv("a")}, {"1"})));

  Theory nd = builtin("nondet");
  Term under = Term::lam("x", eff("or", {eff("or", {v("x"), pv("a")}), pv("b")}));
  auto nr = symbolic_redexes(under, nd.rules);
  REQUIRE(nr.size() == 1);
  CHECK(nr[0].position == Position{0});

  CHECK(symbolic_redexes(pv("v"), nd.rules).empty());

  Term in_subject = Term::let("x", eff("or", {eff("or", {pv("a"), pv("b")}), pv("c")}), Term::pure(v("x")));
  auto both = all_redexes(in_subject, nd.rules);
  CHECK(rule_names(both) == std::vector<std::string>{ml_rule::eff_assoc, "or-assoc"});
}

TEST_CASE("step") {
  Term t = Term::let("x", pv("v"), Term::pure(v("x")));
  auto rs = ml_redexes(t);
  CHECK(syntactically_equal(step(t, rs[0], {}), pv("v")));

  Theory nd = builtin("nondet");
  Term o = eff("or", {eff("or", {pv("a"), pv("b")}), pv("c")});
  auto r = symbolic_redexes(o, nd.rules);
  CHECK(syntactically_equal(step(o, r[0], nd.rules), eff("or", {pv("a"), eff("or", {pv("b"), pv("c")})})));

  CHECK_THROWS_AS(step(pv("q"), rs[0], {}), StaleRedex);
  CHECK_THROWS_AS(step(o, rs[0], nd.rules), StaleRedex);
}

TEST_CASE("normalize") {
  SUBCASE("normal terms are returned unchanged") {
    auto r = normalize(pv("v"), {});
    CHECK(syntactically_equal(r.term, pv("v")));
    CHECK(r.trace.steps.empty());
    CHECK_FALSE(r.fuel_exhausted);
  }
  SUBCASE("a global-state trace reduces to the state its execution ends in") {
    BuiltinOptions opts;
    opts.state_domain = {"1", "2"};
    Theory gs = builtin("global-state", opts);
    Term t = eff("assign", {eff("get", {eff("assign", {pv("a")}, {"2"}), pv("b")})}, {"1"});
    auto run = testing::run_state_trace(t, opts.state_domain, "1");
    Term expected = eff("assign", {Term::pure(v(run.leaf.c_str()))}, {run.store});
    for (auto s : {Strategy::leftmost_outermost(), Strategy::rightmost_innermost(), Strategy::random(3)}) {
      auto r = normalize(t, gs.rules, s);
      CHECK(syntactically_equal(r.term, expected));
    }
    CHECK(print_term(expected) == "(eff assign (2) (pure a))");
  }
  SUBCASE("fuel") {
    Term t = Term::let("x", pv("v"), Term::pure(v("x")));
    auto r = normalize(t, {}, {}, 0);
    CHECK(r.fuel_exhausted);
    CHECK(syntactically_equal(r.term, t));
    auto one = normalize(t, {}, {}, 1);
    CHECK_FALSE(one.fuel_exhausted);
  }
  SUBCASE("trace steps chain") {
    Theory nd = builtin("nondet");
    testing::Rng rng(5);
    Term t = testing::random_or_tree(rng, 7);
    auto r = normalize(t, nd.rules, Strategy::random(11));
    Term cur = t;
    for (const auto& s : r.trace.steps) {
      auto rs = all_redexes(cur, nd.rules);
      CHECK(std::any_of(rs.begin(), rs.end(), [&](const Redex& x) {
        return x.position == s.position && x.rule == s.rule && syntactically_equal(x.reduct, s.reduct);
      }));
      cur = s.reduct;
    }
    CHECK(syntactically_equal(cur, r.term));
    CHECK(all_redexes(r.term, nd.rules).empty());
  }
}

TEST_CASE("strategies pick the documented redex") {
  // or(or(a, or(or(b,c),d)), e): redexes at root and at 0.1
  Theory nd = builtin("nondet");
  Term inner = eff("or", {eff("or", {pv("b"), pv("c")}), pv("d")});
  Term t = eff("or", {eff("or", {pv("a"), inner}), pv("e")});
  auto lo = normalize(t, nd.rules, Strategy::leftmost_outermost(), 1);
  auto ri = normalize(t, nd.rules, Strategy::rightmost_innermost(), 1);
  CHECK(lo.trace.steps.at(0).position == Position{});
  CHECK(ri.trace.steps.at(0).position == Position{0, 1});

  // ml before symbolic at the same position
  Term both = Term::let("x", eff("or", {eff("or", {pv("a"), pv("b")}), pv("c")}), Term::pure(v("x")));
  auto first = normalize(both, nd.rules, Strategy::leftmost_outermost(), 1);
  CHECK(first.trace.steps.at(0).rule == ml_rule::eff_assoc);
}

TEST_CASE("normalization is deterministic") {
  Theory gs = builtin("global-state");
  testing::TermGenerator gen(gs, 99);
  for (int i = 0; i < 20; ++i) {
    Term t = gen.computation(25);
    for (auto s : {Strategy::leftmost_outermost(), Strategy::rightmost_innermost(), Strategy::random(i)}) {
      auto a = normalize(t, gs.rules, s);
      auto b = normalize(t, gs.rules, s);
      CHECK(trace_to_text(a.trace) == trace_to_text(b.trace));
    }
  }
}

TEST_CASE("trace export") {
  Term t = Term::let("y", Term::let("x", pv("a"), pv("b")), Term::pure(v("y")));
  auto r = normalize(t, {});
  std::string text = trace_to_text(r.trace);
  CHECK(text.rfind("let-assoc @ root : ", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(r.trace.steps.size()));
  std::string json = trace_to_json(r.trace);
  CHECK(json.find("\"rule\": \"let-assoc\"") != std::string::npos);
  CHECK(json.find("\"final\": \"(pure b)\"") != std::string::npos);
}

TEST_CASE("left nesting measure") {
  Term t1 = pv("a"), t2 = pv("b"), u = pv("c");
  CHECK(left_nesting_measure(Term::let("y", Term::let("x", t1, t2), u)) == 1);
  CHECK(left_nesting_measure(Term::let("x", t1, Term::let("y", t2, u))) == 0);
  CHECK(left_nesting_measure(pv("v")) == 0);
  // Counted by hand on the tree: the y-let and the x-let both sit inside a subject.
  CHECK(left_nesting_measure(Term::let("z", Term::let("y", Term::let("x", v("a"), v("b")), v("c")), u)) == 2);
}

namespace {

/// All interleavings of two effect sequences around a fixed leaf.
std::set<std::string> interleavings(const std::vector<std::string>& left, const std::vector<std::string>& right,
                                    const Term& leaf) {
  std::set<std::string> out;
  std::function<void(std::size_t, std::size_t, std::vector<std::string>)> go =
      [&](std::size_t i, std::size_t j, std::vector<std::string> seq) {
        if (i == left.size() && j == right.size()) {
          Term t = leaf;
          for (auto it = seq.rbegin(); it != seq.rend(); ++it) t = eff(*it, {t});
          out.insert(print_term(t));
          return;
        }
        if (i < left.size()) {
          auto s = seq;
          s.push_back(left[i]);
          go(i + 1, j, s);
        }
        if (j < right.size()) {
          auto s = seq;
          s.push_back(right[j]);
          go(i, j + 1, s);
        }
      };
  go(0, 0, {});
  return out;
}

std::set<std::string> graph_normal_forms(const ReductionGraph& g) {
  std::set<std::string> out;
  for (auto i : g.normal_forms) out.insert(print_term(g.nodes[i]));
  return out;
}

} // namespace

TEST_CASE("reduction graphs") {
  SUBCASE("a value has a single node") {
    auto g = reduction_graph(pv("v"), {});
    CHECK(g.nodes.size() == 1);
    CHECK(g.edges.empty());
    CHECK(g.normal_forms == std::vector<std::size_t>{0});
    CHECK(g.longest_path == 0u);
  }
  SUBCASE("or-assoc is a single step") {
    Theory nd = builtin("nondet");
    auto g = reduction_graph(eff("or", {eff("or", {pv("a"), pv("b")}), pv("c")}), nd.rules);
    CHECK(g.nodes.size() == 2);
    CHECK(g.edges.size() == 1);
    CHECK(g.longest_path == 1u);
    CHECK(graph_normal_forms(g) == std::set<std::string>{"(eff or () (pure a) (eff or () (pure b) (pure c)))"});
  }
  SUBCASE("par interleaves its operands' effects") {
    Theory par = builtin("par");
    Term leaf = eff("par", {pv("v"), pv("w")});
    auto g = reduction_graph(eff("par", {eff("e1", {pv("v")}), eff("e2", {pv("w")})}), par.rules);
    CHECK_FALSE(g.truncated);
    CHECK(g.acyclic);
    CHECK(graph_normal_forms(g) == interleavings({"e1"}, {"e2"}, leaf));
    CHECK(g.normal_forms.size() == 2);

    auto g3 = reduction_graph(eff("par", {eff("e1", {eff("e2", {pv("v")})}), eff("e1", {pv("w")})}), par.rules);
    CHECK(graph_normal_forms(g3) == interleavings({"e1", "e2"}, {"e1"}, leaf));
  }
  SUBCASE("truncation") {
    Theory par = builtin("par");
    Term t = eff("par", {eff("e1", {eff("e2", {pv("v")})}), eff("e2", {eff("e1", {pv("w")})})});
    auto g = reduction_graph(t, par.rules, 3);
    CHECK(g.truncated);
    CHECK(g.nodes.size() <= 3);
  }
  SUBCASE("worker count does not change the result") {
    Theory gs = builtin("global-state");
    testing::TermGenerator gen(gs, 4);
    for (int i = 0; i < 10; ++i) {
      Term t = gen.computation(20);
      auto a = reduction_graph(t, gs.rules, default_node_fuel, 1);
      auto b = reduction_graph(t, gs.rules, default_node_fuel, 3);
      CHECK(graph_to_dot(a) == graph_to_dot(b));
    }
  }
  SUBCASE("dot export") {
    Theory nd = builtin("nondet");
    auto g = reduction_graph(eff("or", {eff("or", {pv("a"), pv("b")}), pv("c")}), nd.rules);
    std::string dot = graph_to_dot(g);
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot.find("or-assoc") != std::string::npos);
    CHECK(dot.find("peripheries=2") != std::string::npos);
  }
}

TEST_CASE("every strategy lands in the oracle's normal forms") {
  for (const auto& name : builtin_names()) {
    Theory th = builtin(name);
    testing::TermGenerator gen(th, 21);
    for (int i = 0; i < 15; ++i) {
      Term t = gen.computation(18);
      auto g = reduction_graph(t, th.rules, 20000);
      if (g.truncated || !g.acyclic) continue;
      std::set<std::string> nfs;
      for (auto k : g.normal_forms) nfs.insert(canonical_key(g.nodes[k]));
      for (auto s : {Strategy::leftmost_outermost(), Strategy::rightmost_innermost(), Strategy::random(i)}) {
        auto r = normalize(t, th.rules, s);
        CAPTURE(print_term(t));
        CHECK(nfs.count(canonical_key(r.term)) == 1);
      }
    }
  }
}
