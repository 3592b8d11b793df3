#include "effrw/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "effrw/kernel.hpp"
#include "effrw/rpo.hpp"
#include "effrw/theory.hpp"

namespace effrw::cli {

namespace {

/// Problem worth a usage exit: bad flag values, unreadable files.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::optional<std::size_t> parse_count(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
}

std::size_t resolve_fuel(const Invocation& inv, std::size_t fallback) {
  if (inv.fuel) return *inv.fuel;
  if (const char* env = std::getenv(fuel_env)) {
    auto v = parse_count(env);
    if (!v) throw UsageError(std::string(fuel_env) + " must be a non-negative integer, got '" + env + "'");
    return *v;
  }
  return fallback;
}

Theory load_theories(const Invocation& inv) {
  std::vector<Theory> parts;
  for (const auto& b : inv.builtins) {
    try {
      parts.push_back(builtin(b));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  for (const auto& p : inv.theory_paths) parts.push_back(load_theory(read_file(p)));
  if (parts.empty()) {
    Theory empty;
    empty.name = "empty";
    return empty;
  }
  if (parts.size() == 1) return parts.front();
  return compose(parts);
}

std::string term_source(const Invocation& inv, std::istream& in) {
  if (inv.term_text && inv.term_path) throw UsageError("give either --term or --term-file, not both");
  if (inv.term_text) {
    if (*inv.term_text != "-") return *inv.term_text;
  } else if (!inv.term_path) {
    throw UsageError("this command needs a term (--term or --term-file)");
  } else if (*inv.term_path != "-") {
    return read_file(*inv.term_path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Types the term with declared variables fixed and every other free
/// variable left to inference.
Type type_term(const Theory& th, const Term& t, const std::vector<std::string>& var_decls) {
  Typechecker tc(th.signature);
  TypingContext ctx;
  std::set<std::string> declared;
  for (const auto& d : var_decls) {
    auto colon = d.find(':');
    if (colon == std::string::npos || colon == 0) throw UsageError("--var expects NAME:TYPE, got '" + d + "'");
    std::string name = d.substr(0, colon);
    ctx.push(name, parse_type(d.substr(colon + 1)));
    declared.insert(name);
  }
  for (const auto& v : free_vars(t))
    if (!declared.count(v)) ctx.push(v, tc.fresh());
  return canonical_metas(tc.resolve(tc.infer(ctx, t)));
}

Term load_term(const Invocation& inv, const Theory& th, std::istream& in, Type* type_out = nullptr) {
  Term t = parse_term(term_source(inv, in), th.signature);
  Type ty = type_term(th, t, inv.var_decls);
  if (type_out) *type_out = ty;
  return t;
}

void write_output(const Invocation& inv, std::ostream& out, const std::string& text) {
  if (!inv.output_path) {
    out << text;
    return;
  }
  std::ofstream f(*inv.output_path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + *inv.output_path + "'");
  f << text;
}

int cmd_check(const Invocation& inv, std::istream& in, std::ostream& out) {
  Theory th = load_theories(inv);
  Type ty = Type::base("?");
  load_term(inv, th, in, &ty);
  if (inv.format == Format::Json)
    out << nlohmann::json{{"type", to_string(ty)}}.dump(2) << "\n";
  else
    out << to_string(ty) << "\n";
  return exit_ok;
}

int cmd_normalize(const Invocation& inv, std::istream& in, std::ostream& out, std::ostream& err,
                  bool trace_only) {
  Theory th = load_theories(inv);
  Term t = load_term(inv, th, in);
  std::size_t fuel = resolve_fuel(inv, default_step_fuel);
  NormalizeResult r = normalize(t, th.rules, inv.strategy, fuel);
  bool show_trace = trace_only || inv.show_trace;
  if (inv.format == Format::Json) {
    nlohmann::json j;
    j["normal_form"] = print_term(r.term);
    j["fuel_exhausted"] = r.fuel_exhausted;
    j["steps"] = r.trace.steps.size();
    if (show_trace) j["trace"] = nlohmann::json::parse(trace_to_json(r.trace));
    out << j.dump(2) << "\n";
  } else {
    if (show_trace) out << trace_to_text(r.trace);
    if (!trace_only) out << print_term(r.term) << "\n";
  }
  if (r.fuel_exhausted) {
    err << "fuel exhausted after " << r.trace.steps.size() << " step(s)\n";
    return exit_fuel;
  }
  return exit_ok;
}

int cmd_certify(const Invocation& inv, std::ostream& out) {
  Theory th = load_theories(inv);
  CertReport report = certify_theory(th);
  out << (inv.format == Format::Json ? report_to_json(report) : report_to_text(report));
  return report.overall ? exit_ok : exit_certification;
}

int cmd_search(const Invocation& inv, std::ostream& out, std::ostream& err) {
  Theory th = load_theories(inv);
  std::optional<Precedence> found;
  try {
    found = search_precedence(th.rules, inv.search_bound);
  } catch (const SearchBoundExceeded& e) {
    err << e.what() << "\n";
    return exit_certification;
  }
  if (inv.format == Format::Json) {
    nlohmann::json j;
    if (!found) {
      j["precedence"] = nullptr;
    } else {
      j["precedence"] = nlohmann::json::array();
      for (const auto& [a, b] : found->generators())
        j["precedence"].push_back({to_string(a), to_string(b)});
    }
    out << j.dump(2) << "\n";
  } else {
    out << (found ? to_string(*found) : std::string("none")) << "\n";
  }
  return found ? exit_ok : exit_certification;
}

int cmd_graph(const Invocation& inv, std::istream& in, std::ostream& out, std::ostream& err) {
  Theory th = load_theories(inv);
  Term t = load_term(inv, th, in);
  std::size_t fuel = resolve_fuel(inv, default_node_fuel);
  ReductionGraph g = reduction_graph(t, th.rules, fuel, inv.workers);
  if (inv.format == Format::Json) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : g.nodes) j["nodes"].push_back(print_term(n));
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges)
      j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"rule", e.rule}, {"position", e.position}});
    j["normal_forms"] = g.normal_forms;
    j["truncated"] = g.truncated;
    j["acyclic"] = g.acyclic;
    j["longest_path"] = g.longest_path ? nlohmann::json(*g.longest_path) : nlohmann::json(nullptr);
    write_output(inv, out, j.dump(2) + "\n");
  } else {
    write_output(inv, out, graph_to_dot(g));
  }
  if (g.truncated) {
    err << "graph truncated at " << fuel << " node(s)\n";
    return exit_fuel;
  }
  return exit_ok;
}

int cmd_theories(const Invocation& inv, std::ostream& out) {
  if (inv.builtins.empty() && inv.theory_paths.empty()) {
    if (inv.format == Format::Json)
      out << nlohmann::json(builtin_names()).dump(2) << "\n";
    else
      for (const auto& n : builtin_names()) out << n << "\n";
    return exit_ok;
  }
  out << theory_to_text(load_theories(inv));
  return exit_ok;
}

Strategy::Kind parse_strategy(const std::string& s) {
  if (s == "lo" || s == "leftmost-outermost") return Strategy::Kind::LeftmostOutermost;
  if (s == "ri" || s == "rightmost-innermost") return Strategy::Kind::RightmostInnermost;
  if (s == "random") return Strategy::Kind::Random;
  throw UsageError("unknown strategy '" + s + "' (expected lo, ri or random)");
}

} // namespace

std::optional<Invocation> parse_args(const std::vector<std::string>& args, std::ostream& out,
                                     std::ostream& err, int& exit_code) {
  CLI::App app{"Rewriting and termination certification for effectful metalanguage terms", "effrw"};
  app.require_subcommand(1);

  Invocation inv;
  std::string strategy = "lo";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> fuel_text;
  std::string format = "text";

  struct Spec {
    const char* name;
    const char* help;
    Command command;
    bool term;
    bool rewriting;
  };
  const Spec specs[] = {
      {"check", "Typecheck a term and print its type", Command::Check, true, false},
      {"normalize", "Reduce a term to normal form", Command::Normalize, true, true},
      {"trace", "Print every step of a normalization", Command::Trace, true, true},
      {"certify", "Certify the rules of a theory with the recursive path ordering", Command::Certify,
       false, false},
      {"search", "Search for a precedence that certifies every rule", Command::Search, false, false},
      {"graph", "Write the reduction graph of a term in DOT format", Command::Graph, true, true},
      {"theories", "List builtin theories, or print the selected theory", Command::Theories, false,
       false},
  };

  for (const auto& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->callback([&inv, c = spec.command] { inv.command = c; });
    sub->add_option("-b,--builtin", inv.builtins, "Builtin theory (repeatable)");
    sub->add_option("-t,--theory", inv.theory_paths, "Theory file (repeatable)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    if (spec.term) {
      sub->add_option("--term", inv.term_text, "Inline term, or - for standard input");
      sub->add_option("--term-file", inv.term_path, "File holding the term, or - for standard input");
      sub->add_option("--var", inv.var_decls, "Free variable type, NAME:TYPE (repeatable)");
    }
    if (spec.rewriting) {
      sub->add_option("--fuel", fuel_text, "Step bound (normalize, trace) or node bound (graph)");
    }
    if (spec.command == Command::Normalize || spec.command == Command::Trace) {
      sub->add_option("--strategy", strategy, "lo, ri or random");
      sub->add_option("--seed", seed, "Seed for the random strategy");
    }
    if (spec.command == Command::Normalize) sub->add_flag("--trace", inv.show_trace, "Also print the trace");
    if (spec.command == Command::Graph) {
      sub->add_option("--workers", inv.workers, "Exploration threads")->check(CLI::Range(1u, 256u));
      sub->add_option("-o,--output", inv.output_path, "Write the graph to a file");
    }
    if (spec.command == Command::Search)
      sub->add_option("--bound", inv.search_bound, "Largest number of symbols to search over");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    inv.format = format == "json" ? Format::Json : Format::Text;
    inv.strategy.kind = parse_strategy(strategy);
    if (inv.strategy.kind == Strategy::Kind::Random) {
      if (!seed) throw UsageError("--strategy random needs --seed");
      inv.strategy.seed = *seed;
    } else if (seed) {
      throw UsageError("--seed only applies to --strategy random");
    }
    if (fuel_text) {
      inv.fuel = parse_count(*fuel_text);
      if (!inv.fuel) throw UsageError("--fuel must be a non-negative integer");
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    exit_code = code == 0 ? exit_ok : exit_usage;
    return std::nullopt;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    exit_code = exit_usage;
    return std::nullopt;
  }
  return inv;
}

int execute(const Invocation& inv, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    switch (inv.command) {
    case Command::Check: return cmd_check(inv, in, out);
    case Command::Normalize: return cmd_normalize(inv, in, out, err, false);
    case Command::Trace: return cmd_normalize(inv, in, out, err, true);
    case Command::Certify: return cmd_certify(inv, out);
    case Command::Search: return cmd_search(inv, out, err);
    case Command::Graph: return cmd_graph(inv, in, out, err);
    case Command::Theories: return cmd_theories(inv, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return exit_parse_or_type;
  } catch (const TypeError& e) {
    err << "type error: " << e.what() << "\n";
    return exit_parse_or_type;
  } catch (const TheoryError& e) {
    err << "theory error: " << e.what() << "\n";
    return exit_parse_or_type;
  }
  return exit_usage;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  int code = exit_ok;
  auto inv = parse_args(args, out, err, code);
  if (!inv) return code;
  return execute(*inv, in, out, err);
}

} // namespace effrw::cli
