#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "effrw/kernel.hpp"
#include "effrw/theory.hpp"

namespace effrw::testing {

using Rng = std::mt19937_64;

/// Random well-typed terms over a theory's signature.
///
/// Every base type b gets two free variables: `v_b : b` and `c_b : E(b)`.
/// Terms mix lambdas, applications (mostly beta redexes), lets, pure,
/// effect symbols and function symbols.
class TermGenerator {
public:
  TermGenerator(const Theory& theory, std::uint64_t seed);

  /// A term of type `type` with at most `max_size` nodes.
  Term generate(const Type& type, std::size_t max_size);
  /// A computation (type E(b) for a random base b) with at most `max_size` nodes.
  Term computation(std::size_t max_size);

  /// Context typing the free variables the generator uses.
  const TypingContext& context() const { return free_; }
  Rng& rng() { return rng_; }

private:
  Term gen(const Type& type, std::size_t budget, std::vector<std::pair<std::string, Type>>& scope);
  Term leaf(const Type& type, std::vector<std::pair<std::string, Type>>& scope);
  std::string fresh();
  Type random_value_type();

  const Theory& theory_;
  Rng rng_;
  TypingContext free_;
  std::size_t counter_ = 0;
  std::vector<const SymbolDecl*> effects_;
  std::vector<const SymbolDecl*> functions_;
};

/// Random terms of the symbolic fragment over `sig`, built from the given
/// variables, with depth at most `depth`.
Term random_symbolic(const Signature& sig, const std::vector<std::string>& vars, Rng& rng,
                     std::size_t depth);

/// Binary or-trees over leaves (pure l0) ... (pure l{n-1}) in order.
Term random_or_tree(Rng& rng, std::size_t leaves);

/// In-order leaf names and or-count of an or-tree.
std::vector<std::string> or_leaves(const Term& t);
std::size_t or_count(const Term& t);

/// Ground global-state traces rooted at an assign, depth at most `depth`,
/// leaves pure(a0), pure(a1), ... numbered left to right.
Term random_state_trace(Rng& rng, const std::vector<std::string>& domain, std::size_t depth);

/// Runs a global-state trace against a store: returns the final store value
/// and the leaf variable reached. `initial` is the starting value index.
struct TraceRun {
  std::string store;
  std::string leaf;
};
TraceRun run_state_trace(const Term& t, const std::vector<std::string>& domain,
                         const std::string& initial);

/// Every subterm, root first.
std::vector<Term> subterms(const Term& t);

} // namespace effrw::testing
