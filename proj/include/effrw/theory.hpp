#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "effrw/rewrite.hpp"
#include "effrw/rpo.hpp"
#include "effrw/signature.hpp"

namespace effrw {

/// Semantic problem with a theory: ill-typed or ill-scoped rule, undeclared
/// base type, name clash on composition, ...
class TheoryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A signature with its rewrite rules and declared precedence.
///
/// `distributors` name binary effects (like `par`) whose distribution rules
///   d(e(s1..sn), t) ~> e(d(s1,t), ..., d(sn,t))
///   d(s, e(t1..tn)) ~> e(d(s,t1), ..., d(s,tn))
/// are generated for every other effect identity e, together with d > e in
/// the precedence. They are regenerated whenever the signature grows.
struct Theory {
  std::string name;
  std::vector<std::string> base_types;
  std::map<std::string, ParamDomain> domains;
  Signature signature;
  std::vector<RewriteRule> rules;
  std::vector<std::string> distributors;
  /// Declared precedence over identities (families already expanded).
  std::vector<Precedence::Pair> declared_precedence;
  /// Precedence contributed by distribution schemas.
  std::vector<Precedence::Pair> schema_precedence;

  Precedence precedence() const;
  const RewriteRule* find_rule(const std::string& rule_name) const;
};

struct BuiltinOptions {
  /// Values the global-state location can hold; also the arity of `get`.
  std::vector<std::string> state_domain{"0", "1"};
  /// Effects that `par` distributes over, besides `join`.
  std::vector<std::string> par_effects{"e1", "e2"};
  /// Number of success continuations of `request`.
  std::size_t request_successes = 2;
};

std::vector<std::string> builtin_names();

/// global-state, nondet, par, retry, peano. Throws std::invalid_argument
/// for any other name.
Theory builtin(const std::string& name, const BuiltinOptions& options = {});

/// Parses and validates a theory file. Throws ParseError for syntax
/// problems and TheoryError for semantic ones.
Theory load_theory(std::string_view text);

/// Union of signatures and rules, with distribution schemas re-instantiated
/// over the combined effects. Symbols declared identically in several
/// theories are shared; a symbol declared differently, a domain with
/// different values, or a rule name used twice is a clash (TheoryError).
Theory compose(const std::vector<Theory>& theories);

/// Loadable text form. Generated rules are omitted (the `distribute`
/// clause regenerates them).
std::string theory_to_text(const Theory& t);

/// Same content up to alpha-renaming inside rules.
bool equivalent(const Theory& a, const Theory& b);

/// Checks that each rule is well scoped and, for non-extended rules, that
/// both sides have the same type under a shared typing of the rule
/// variables. Throws TheoryError naming the rule and side.
void validate_theory(const Theory& t);

/// Sets `certified` on every rule that passes under the theory precedence.
CertReport certify_theory(Theory& t);

/// succ(...succ(zero())...) with `n` successors.
Term peano_numeral(std::size_t n);
std::optional<std::size_t> peano_value(const Term& t);

} // namespace effrw
