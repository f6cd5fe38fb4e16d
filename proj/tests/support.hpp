// Shared helpers for the unit and acceptance suites: the formula corpus,
// exhaustive word enumeration, an independent backward-induction game oracle,
// a symbolic-automaton walker, an all-adversaries strategy check, random
// Boolean expressions with tree-walk semantics, and small DFA constructions.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lisaforge/bdd.hpp"
#include "lisaforge/explicit_dfa.hpp"
#include "lisaforge/ltlf.hpp"
#include "lisaforge/symbolic_dfa.hpp"
#include "lisaforge/synthesis.hpp"

namespace lisaforge::testsupport {

// -- corpus -----------------------------------------------------------------

struct CorpusEntry {
  std::string name;     // stable identifier for diagnostics
  std::string text;     // formula source
  Partition partition;  // covers the formula's propositions
};

/// Atoms split alternately by sorted position: even index input, odd output.
Partition alternating_partition(const std::set<std::string>& props);

/// Thirty hand-written formulas covering every connective and the trace-end
/// edge cases, plus thirty seeded fuzz formulas (depth <= 4, <= 3 atoms).
std::vector<CorpusEntry> corpus();

// -- word enumeration -------------------------------------------------------

/// All 2^|props| letters, in bitmask order (bit i = props[i]).
std::vector<Letter> letters_over(const std::vector<std::string>& props);

/// Visits every nonempty word of length <= max_len over props, sharing one
/// trace buffer across calls (depth-first, prefix before its extensions).
void for_each_word(const std::vector<std::string>& props, std::size_t max_len,
                   const std::function<void(const Trace&)>& visit);

// -- explicit game oracle ---------------------------------------------------

struct GameOracle {
  bool realizable = false;
  std::vector<char> winning;  // per automaton state
};

/// Backward induction on a tabulated automaton, independent of the diagram
/// pipeline: a state wins if it is accepting or if for every input letter
/// some output letter moves to a winning state; repeat until stable.
GameOracle solve_by_backward_induction(const ExplicitDfa& d,
                                       const Partition& p);

// -- symbolic walking and strategy checking ---------------------------------

/// Steps a symbolic automaton state by state, for cross-checks that must not
/// trust the higher-level simulate() path.
class SymbolicWalker {
 public:
  explicit SymbolicWalker(const SymbolicDfa& d);

  std::vector<bool> initial() const;
  bool accepting(const std::vector<bool>& state_bits) const;
  /// Successor under a full letter; atoms outside the automaton's support
  /// are ignored, support atoms missing from the letter read false.
  std::vector<bool> step(const std::vector<bool>& state_bits,
                         const Letter& letter) const;

 private:
  const SymbolicDfa* dfa_;
};

/// Plays the controller against *every* input sequence at once: explores the
/// strategy-restricted state graph and demands each play visit an accepting
/// state within `horizon` rounds (a cycle that dodges acceptance, or a path
/// longer than the horizon, is a counterexample).  Returns a description of
/// the first failure, or nullopt when the controller wins everywhere.
std::optional<std::string> strategy_counterexample(const Strategy& s,
                                                   std::size_t horizon);

// -- random Boolean expressions for the diagram suite -----------------------

struct BoolExpr {
  enum class Kind { Const, Var, Not, And, Or, Xor, Ite };
  struct Node {
    Kind kind = Kind::Const;
    bool value = false;     // Const
    std::size_t var = 0;    // Var: index into the variable list
    int a = -1, b = -1, c = -1;
  };
  std::vector<Node> nodes;
  int root = -1;

  /// Tree-walk evaluation, the independent semantics.
  bool eval(const std::vector<bool>& assignment) const;
};

/// Seeded random expression over `num_vars` variables.
BoolExpr random_bool_expr(std::size_t num_vars, std::size_t depth,
                          std::mt19937_64& rng);

/// The expression compiled through the diagram engine.
BddRef to_bdd(const BoolExpr& e, BddManager& m,
              const std::vector<std::uint32_t>& vars);

// -- small automata ---------------------------------------------------------

/// Automaton over one atom counting positions modulo `mod`, accepting at
/// residue zero; both letter values advance, so it is already minimal.
ExplicitDfa cyclic_counter(std::uint32_t mod, const std::string& atom);

}  // namespace lisaforge::testsupport
