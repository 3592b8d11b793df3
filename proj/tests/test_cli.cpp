#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "effrw/cli.hpp"
#include "effrw/kernel.hpp"
#include "effrw/rpo.hpp"
#include "effrw/theory.hpp"

using namespace effrw;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(EFFRW_DATA_DIR) + "/" + name; }

const char* nested_or = "(fn or (fn or (pure a) (pure b)) (pure c))";

} // namespace

TEST_CASE("theories lists the builtins") {
  auto r = run_cli({"theories"});
  CHECK(r.code == 0);
  std::string expected;
  for (const auto& n : builtin_names()) expected += n + "\n";
  CHECK(r.out == expected);

  auto text = run_cli({"theories", "--builtin", "nondet"});
  CHECK(text.code == 0);
  CHECK(text.out == theory_to_text(builtin("nondet")));
}

TEST_CASE("check prints the inferred type") {
  auto r = run_cli({"check", "--term", "(let x (pure v) (pure x))", "--var", "v:B"});
  CHECK(r.code == 0);
  CHECK(r.out == "(E B)\n");
  auto open = run_cli({"check", "--term", "(pure v)"});
  CHECK(open.out == "(E ?0)\n");
  auto json = run_cli({"check", "--term", "(pure v)", "--var", "v:B", "--format", "json"});
  CHECK(json.out.find("\"type\": \"(E B)\"") != std::string::npos);
}

TEST_CASE("normalize matches the library") {
  Theory nd = builtin("nondet");
  Term t = parse_term(nested_or, nd.signature);
  auto lib = normalize(t, nd.rules);

  auto r = run_cli({"normalize", "--builtin", "nondet", "--term", nested_or});
  CHECK(r.code == 0);
  CHECK(r.out == print_term(lib.term) + "\n");
  CHECK(r.out == "(eff or () (pure a) (eff or () (pure b) (pure c)))\n");
  CHECK(r.err.empty());

  auto traced = run_cli({"normalize", "--builtin", "nondet", "--term", nested_or, "--trace"});
  CHECK(traced.out == trace_to_text(lib.trace) + print_term(lib.term) + "\n");

  auto trace_only = run_cli({"trace", "-b", "nondet", "--term", nested_or});
  CHECK(trace_only.out == trace_to_text(lib.trace));
}

TEST_CASE("random strategy needs a seed and is reproducible") {
  auto missing = run_cli({"normalize", "--strategy", "random", "--term", "(pure a)"});
  CHECK(missing.code == cli::exit_usage);
  auto stray = run_cli({"normalize", "--seed", "3", "--term", "(pure a)"});
  CHECK(stray.code == cli::exit_usage);

  std::vector<std::string> args{"trace", "-b", "global-state", "--strategy", "random", "--seed", "42", "--term",
                                "(eff assign (0) (eff get () (eff assign (1) (eff get () (pure a) (pure b))) "
                                "(eff get () (pure c) (pure d))))"};
  auto a = run_cli(args);
  auto b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  Theory gs = builtin("global-state");
  auto lib = normalize(parse_term(args.back(), gs.signature), gs.rules, Strategy::random(42));
  CHECK(a.out == trace_to_text(lib.trace));
}

TEST_CASE("fuel") {
  auto zero = run_cli({"normalize", "--fuel", "0", "-b", "nondet", "--term", nested_or});
  CHECK(zero.code == cli::exit_fuel);
  CHECK(zero.err.find("fuel") != std::string::npos);
  CHECK(run_cli({"normalize", "--fuel", "x", "--term", "(pure a)"}).code == cli::exit_usage);

  setenv(cli::fuel_env, "0", 1);
  CHECK(run_cli({"normalize", "-b", "nondet", "--term", nested_or}).code == cli::exit_fuel);
  CHECK(run_cli({"normalize", "--fuel", "5", "-b", "nondet", "--term", nested_or}).code == 0);
  setenv(cli::fuel_env, "lots", 1);
  CHECK(run_cli({"normalize", "--term", "(pure a)"}).code == cli::exit_usage);
  unsetenv(cli::fuel_env);

  auto graph = run_cli({"graph", "--fuel", "1", "-b", "nondet", "--term", nested_or});
  CHECK(graph.code == cli::exit_fuel);
}

TEST_CASE("terms from files and standard input") {
  auto file = run_cli({"normalize", "-b", "peano", "-t", data("readbit.thy"), "--term-file", data("readbit.term")});
  CHECK(file.code == 0);
  Theory all = compose({builtin("peano"), load_theory("(theory readbit (base Nat) (domain msg (cold hot)) "
                                                      "(effect readbit 2) (effect print msg 1))")});
  Term expected = Term::sym(
      SymbolKind::Effect, "readbit", {},
      {Term::sym(SymbolKind::Effect, "print", {"cold"}, {Term::pure(peano_numeral(35))}),
       Term::sym(SymbolKind::Effect, "print", {"hot"}, {Term::pure(peano_numeral(75))})});
  CHECK(file.out == print_term(expected) + "\n");

  auto stdin_term = run_cli({"normalize", "-b", "nondet", "--term", "-"}, nested_or);
  CHECK(stdin_term.out == "(eff or () (pure a) (eff or () (pure b) (pure c)))\n");
  auto stdin_file = run_cli({"normalize", "-b", "nondet", "--term-file", "-"}, nested_or);
  CHECK(stdin_file.out == stdin_term.out);
}

TEST_CASE("certify and search") {
  for (const auto& name : {"global-state", "nondet", "par", "retry", "peano"}) {
    auto r = run_cli({"certify", "--builtin", name});
    CAPTURE(name);
    CHECK(r.code == 0);
    Theory th = builtin(name);
    CHECK(r.out == report_to_text(certify_theory(th)));
  }
  auto json = run_cli({"certify", "-b", "retry", "--format", "json"});
  Theory rt = builtin("retry");
  CHECK(json.out == report_to_json(certify_theory(rt)));

  auto found = run_cli({"search", "-b", "par"});
  CHECK(found.code == 0);
  CHECK(found.out == "par > e1, par > e2, par > join\n");
}

TEST_CASE("failing certification and unsuccessful search") {
  std::string path = "cli_test_swap.thy";
  {
    std::ofstream f(path);
    f << "(theory swap (base B) (effect e 1) (effect d 1)\n"
         "  (rule to-d (eff e () x) (eff d () x))\n"
         "  (rule to-e (eff d () x) (eff e () x)))\n";
  }
  auto cert = run_cli({"certify", "-t", path});
  CHECK(cert.code == cli::exit_certification);
  CHECK(cert.out.find("overall: not certified") != std::string::npos);
  auto search = run_cli({"search", "-t", path});
  CHECK(search.code == cli::exit_certification);
  CHECK(search.out == "none\n");
  std::remove(path.c_str());
}

TEST_CASE("errors map to exit codes") {
  CHECK(run_cli({}).code == cli::exit_usage);
  CHECK(run_cli({"frobnicate"}).code == cli::exit_usage);
  CHECK(run_cli({"normalize"}).code == cli::exit_usage);
  CHECK(run_cli({"normalize", "--builtin", "nope", "--term", "(pure a)"}).code == cli::exit_usage);
  CHECK(run_cli({"normalize", "--theory", "/nonexistent.thy", "--term", "(pure a)"}).code == cli::exit_usage);

  auto syntax = run_cli({"check", "--term", "(pure a"});
  CHECK(syntax.code == cli::exit_parse_or_type);
  CHECK(syntax.err.find("1:1") != std::string::npos);
  CHECK(syntax.out.empty());

  auto type = run_cli({"check", "--term", "(let x (pure a) x)", "--var", "a:B"});
  CHECK(type.code == cli::exit_parse_or_type);
  CHECK(type.err.find("type error") != std::string::npos);

  CHECK(run_cli({"check", "-b", "nondet", "--term", "(fn or (pure a))"}).code == cli::exit_parse_or_type);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("graph output") {
  Theory par = builtin("par");
  const char* term = "(eff par () (eff e1 () (pure v)) (eff e2 () (pure w)))";
  auto g = reduction_graph(parse_term(term, par.signature), par.rules);
  auto r = run_cli({"graph", "-b", "par", "--term", term});
  CHECK(r.code == 0);
  CHECK(r.out == graph_to_dot(g));
  auto threaded = run_cli({"graph", "-b", "par", "--term", term, "--workers", "4"});
  CHECK(threaded.out == r.out);
  auto json = run_cli({"graph", "-b", "par", "--term", term, "--format", "json"});
  CHECK(json.out.find("\"normal_forms\"") != std::string::npos);

  std::string path = "cli_test_graph.dot";
  auto file = run_cli({"graph", "-b", "par", "--term", term, "-o", path});
  CHECK(file.out.empty());
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == r.out);
  std::remove(path.c_str());
}
