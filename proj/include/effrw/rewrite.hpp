#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "effrw/term.hpp"

namespace effrw {

/// A user rewrite rule l ~> r over the symbolic fragment.
///
/// `extended` rules may additionally use `pure` on either side; a `pure`
/// in the left-hand side only matches a `pure`-wrapped subterm. They are
/// runnable but never certified.
struct RewriteRule {
  std::string name;
  Term lhs;
  Term rhs;
  bool extended = false;
  bool certified = false;
  /// Name of the schema that generated this rule, if any. Generated rules
  /// are discarded and regenerated when theories are composed.
  std::string schema;
};

/// Throws std::invalid_argument unless the rule is in the allowed fragment,
/// its left-hand side is not a variable, and vars(rhs) is a subset of vars(lhs).
void validate_rule(const RewriteRule& rule);

/// Path of child indices from the root.
using Position = std::vector<std::size_t>;

std::string to_string(const Position& p);

const Term& subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& replacement);

/// Rule names used for the metalanguage rules.
namespace ml_rule {
inline constexpr const char* abs_beta = "abs-beta";
inline constexpr const char* let_beta = "let-beta";
inline constexpr const char* let_assoc = "let-assoc";
inline constexpr const char* eff_assoc = "eff-assoc";
} // namespace ml_rule

struct Redex {
  Position position;
  std::string rule;
  /// The whole term after contracting at `position`.
  Term reduct;
};

bool is_ml_rule(const std::string& rule);

/// Contractum of a metalanguage rule applied at the root, if it applies.
std::optional<Term> contract_ml(const Term& t, std::string* rule_name = nullptr);

std::vector<Redex> ml_redexes(const Term& t);

using Bindings = std::map<std::string, Term>;

/// First-order matching. Repeated pattern variables require alpha-equal
/// subjects.
std::optional<Bindings> match_pattern(const Term& pattern, const Term& subject);

/// Replaces pattern variables in a (binder-free) rule side.
Term instantiate(const Term& pattern, const Bindings& b);

std::vector<Redex> symbolic_redexes(const Term& t, const std::vector<RewriteRule>& rules);

/// All redexes in leftmost-outermost order: by position, lexicographically
/// with ancestors first, then metalanguage rules before symbolic ones, then
/// rule order.
std::vector<Redex> all_redexes(const Term& t, const std::vector<RewriteRule>& rules);

class StaleRedex : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Checks that `r` is a redex of `t` under `rules` and returns its reduct.
Term step(const Term& t, const Redex& r, const std::vector<RewriteRule>& rules);

struct Trace {
  Term initial;
  std::vector<Redex> steps;

  const Term& final_term() const { return steps.empty() ? initial : steps.back().reduct; }
};

struct Strategy {
  enum class Kind { LeftmostOutermost, RightmostInnermost, Random };
  Kind kind = Kind::LeftmostOutermost;
  std::uint64_t seed = 0;

  static Strategy leftmost_outermost() { return {Kind::LeftmostOutermost, 0}; }
  static Strategy rightmost_innermost() { return {Kind::RightmostInnermost, 0}; }
  static Strategy random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

std::string to_string(const Strategy& s);

inline constexpr std::size_t default_step_fuel = 10'000;
inline constexpr std::size_t default_node_fuel = 100'000;

struct NormalizeResult {
  Term term;
  Trace trace;
  /// Set when the fuel ran out before a normal form was reached.
  bool fuel_exhausted = false;
};

NormalizeResult normalize(const Term& t, const std::vector<RewriteRule>& rules,
                          Strategy strategy = {}, std::size_t fuel = default_step_fuel);

struct GraphEdge {
  std::size_t from;
  std::size_t to;
  std::string rule;
  Position position;
};

/// Reachable terms, deduplicated modulo alpha. Node 0 is the start term.
struct ReductionGraph {
  std::vector<Term> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::size_t> normal_forms;
  bool truncated = false;
  /// Only meaningful when not truncated.
  bool acyclic = false;
  /// Longest path (in steps) from the start term; set when the explored
  /// graph is acyclic and not truncated.
  std::optional<std::size_t> longest_path;
};

/// Breadth-first exploration of every single step. Exploration stops and
/// sets `truncated` once more than `fuel` nodes would be created. The
/// frontier is expanded by `workers` threads; the result does not depend
/// on the worker count.
ReductionGraph reduction_graph(const Term& t, const std::vector<RewriteRule>& rules,
                               std::size_t fuel = default_node_fuel, unsigned workers = 1);

/// Number of let nodes lying anywhere inside the subject of an enclosing
/// let. A let-assoc step decreases it by one on the rewritten subterm.
std::size_t left_nesting_measure(const Term& t);

/// `<rule> @ <position> : <term>` per step.
std::string trace_to_text(const Trace& trace);
std::string trace_to_json(const Trace& trace);
std::string graph_to_dot(const ReductionGraph& g);

} // namespace effrw
