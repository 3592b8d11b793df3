#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "effrw/rewrite.hpp"
#include "effrw/term.hpp"

namespace effrw {

/// Strict partial order on symbol identities, stored transitively closed.
class Precedence {
public:
  using Pair = std::pair<SymbolId, SymbolId>;

  Precedence() = default;
  /// Closes `pairs` transitively. Throws std::invalid_argument if the
  /// closure relates some identity to itself.
  explicit Precedence(const std::vector<Pair>& pairs);

  bool greater(const SymbolId& a, const SymbolId& b) const;
  bool empty() const noexcept { return closure_.empty(); }
  /// The transitively closed relation.
  const std::set<Pair>& pairs() const noexcept { return closure_; }
  /// The pairs the order was built from.
  const std::vector<Pair>& generators() const noexcept { return generators_; }

  friend bool operator==(const Precedence& a, const Precedence& b) {
    return a.closure_ == b.closure_;
  }

private:
  std::vector<Pair> generators_;
  std::set<Pair> closure_;
};

/// `a > b, c > d` over the generators, or `(empty)`.
std::string to_string(const Precedence& p);

enum class RpoCase {
  Lex,        ///< same symbol, arguments lexicographically greater
  Precedence, ///< head symbol greater in the precedence
  Subterm,    ///< some immediate argument is greater or equal
  Equal,      ///< syntactic equality (the base of the >= relation)
};

/// `case-1-lex`, `case-2-precedence`, `case-3-subterm`, `refl-eq`.
std::string to_string(RpoCase c);

/// Evidence for lhs > rhs (or lhs >= rhs for `Equal`).
///
/// Children by case:
///   Lex:        [deciding argument comparison, then lhs > t_j for each rhs arg]
///   Precedence: [lhs > t_j for each rhs arg]
///   Subterm:    [s_i >= rhs] for the chosen immediate argument s_i
///   Equal:      []
struct RpoDerivation {
  Term lhs;
  Term rhs;
  RpoCase rule;
  std::vector<RpoDerivation> children;
};

class NonSymbolicTerm : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Memoising decision procedure for the recursive path ordering with
/// lexicographic status. Case 3 is tried first, then 1, then 2.
class RpoSolver {
public:
  explicit RpoSolver(const Precedence& prec) : prec_(prec) {}

  std::optional<RpoDerivation> greater(const Term& s, const Term& t);
  std::optional<RpoDerivation> geq(const Term& s, const Term& t);
  bool lex_greater(const std::vector<Term>& ss, const std::vector<Term>& ts);
  /// Decision only, no derivation.
  bool holds(const Term& s, const Term& t);

  /// Head pairs (f, g) for which case 2 was consulted and f > g did not
  /// hold. Used to guide precedence search.
  const std::set<Precedence::Pair>& missing_precedences() const noexcept { return missing_; }

private:
  bool decide(const Term& s, const Term& t);
  RpoDerivation build(const Term& s, const Term& t);

  const Precedence& prec_;
  std::map<std::pair<std::string, std::string>, bool> memo_;
  std::set<Precedence::Pair> missing_;
};

/// s > t, or nullopt. Throws NonSymbolicTerm if either side is outside the
/// symbolic fragment.
std::optional<RpoDerivation> rpo_greater(const Precedence& prec, const Term& s, const Term& t);
std::optional<RpoDerivation> rpo_geq(const Precedence& prec, const Term& s, const Term& t);
/// Throws std::invalid_argument on a length mismatch.
bool lex_greater(const Precedence& prec, const std::vector<Term>& ss, const std::vector<Term>& ts);

/// Re-checks every node of a derivation against the definition without
/// searching.
bool replay_derivation(const Precedence& prec, const RpoDerivation& d);

/// Case labels used anywhere in the derivation.
std::set<RpoCase> cases_used(const RpoDerivation& d);

enum class CertStatus { Certified, RefusedExtended, Failed };
std::string to_string(CertStatus s);

struct RuleCertificate {
  std::string rule;
  CertStatus status = CertStatus::Failed;
  std::optional<RpoDerivation> derivation;
  std::string reason;
};

struct CertReport {
  std::vector<RuleCertificate> rules;
  /// True iff every non-extended rule is certified.
  bool overall = false;
};

CertReport certify_ruleset(const Precedence& prec, const std::vector<RewriteRule>& rules);

std::string report_to_text(const CertReport& r);
std::string report_to_json(const CertReport& r);
std::string derivation_to_text(const RpoDerivation& d);

class SearchBoundExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t default_search_symbol_bound = 8;

/// Looks for a precedence under which every non-extended rule certifies.
/// Grows constraint sets from failed case-2 comparisons first, then falls
/// back to trying every total order on the symbols the rules mention. The
/// returned order is pruned to a minimal set of generating pairs.
std::optional<Precedence> search_precedence(const std::vector<RewriteRule>& rules,
                                            std::size_t symbol_bound = default_search_symbol_bound);

} // namespace effrw
