#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lisaforge/bdd.hpp"
#include "lisaforge/composer.hpp"
#include "lisaforge/ltlf.hpp"
#include "lisaforge/symbolic_dfa.hpp"

namespace lisaforge {

/// Outcome of the reachability game played on a symbolic automaton: the
/// environment picks the inputs of a round, the controller answers with
/// outputs, and the controller wins a play once an accepting state is
/// visited.  `winning` holds every state from which the controller can
/// force a win; `layers` keeps the whole fixpoint chain W_0 ⊆ W_1 ⊆ ... so
/// strategy extraction can always move strictly closer to acceptance.
struct GameResult {
  bool realizable = false;
  /// States (over Z) from which acceptance can be forced.
  BddRef winning;
  /// Applications of the fixpoint update, the final confirming one included;
  /// always at least 1.
  std::size_t iterations = 0;
  /// Diagram size of the winning set after each application.
  std::vector<std::uint64_t> iteration_nodes;
  /// W_0 (the accepting set) up to the fixpoint, one entry per growth step.
  std::vector<BddRef> layers;
};

/// Least-fixpoint winning set: seed W_0 = F, then repeat
///   W_{i+1} = W_i  ∨  ∀inputs ∃outputs ∃Z'. T(Z, P, Z') ∧ W_i(Z')
/// until the diagram stops changing (canonicity makes that an id check).
/// The automaton is realizable iff its initial state lies in the fixpoint.
/// Partition names that the automaton never mentions are ignored; an
/// automaton proposition missing from the partition is an error.
GameResult winning_set(const SymbolicDfa& g, const Partition& p);

/// Mealy-style controller for a realizable game: outputs are a function of
/// the current state and the round's input assignment.  Where the state
/// first entered the winning set at layer r, the chosen outputs force the
/// successor into layer r-1, so plays shrink their distance to acceptance
/// every round and accept within |2^Z| rounds; once accepting (or off the
/// winning set entirely) any defined transition row is followed.  Ties are
/// always broken towards the lexicographically least output assignment in
/// declared `.outputs` order, with false before true.
class Strategy {
 public:
  /// Output values (aligned with output_names()) for the current state and
  /// the environment's input letter.  State bits align with the automaton's
  /// state variables.  Atoms of `inputs` that are not declared inputs throw
  /// std::invalid_argument.
  std::vector<bool> choose(const std::vector<bool>& state_bits,
                           const Letter& inputs) const;

  const std::vector<std::string>& input_names() const { return inputs_; }
  const std::vector<std::string>& output_names() const { return outputs_; }
  const SymbolicDfa& automaton() const { return *dfa_; }

 private:
  friend Strategy extract_strategy(const SymbolicDfa&, const GameResult&,
                                   const Partition&);

  const SymbolicDfa* dfa_ = nullptr;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  /// Variable id per name above, or -1 when the automaton never reads it.
  std::vector<std::int64_t> input_vars_;
  std::vector<std::int64_t> output_vars_;
  std::vector<std::uint32_t> known_output_vars_;  // the >= 0 entries, in order
  /// layers[r] from the game result, to look up a state's layer rank.
  std::vector<BddRef> layers_;
  /// rule_[r-1] over (Z, P): choices whose successor sits in layer r-1,
  /// restricted to states whose rank is exactly r.
  std::vector<BddRef> rules_;
  /// Any choice whose successor stays in the winning set (the relation
  /// ∃Z'. T ∧ W(Z')), used once a play is already accepting.
  BddRef inside_winning_;
  /// Any defined transition row at all, the last resort.
  BddRef any_row_;
};

/// Builds the controller from a realizable game result.  Throws
/// std::logic_error when r says unrealizable.
Strategy extract_strategy(const SymbolicDfa& g, const GameResult& r,
                          const Partition& p);

/// What a simulated play produced: the combined input/output trace, whether
/// some prefix was accepting, and the length of the shortest accepting
/// prefix (0 means the automaton accepts the empty word).
struct SimulationResult {
  Trace trace;
  bool accepted = false;
  std::optional<std::size_t> accepted_at;
};

/// Plays the controller against a fixed environment script, one input letter
/// per round, environment first.  Letters may mention only declared inputs.
/// A script shorter than the objective needs simply reports not-accepted.
SimulationResult simulate(const Strategy& s,
                          const std::vector<Letter>& env_inputs);

/// One end-to-end realizability check.  Owns the decision-diagram manager so
/// the contained references stay valid for the lifetime of the run; the
/// object is movable but not copyable.
struct SynthesisRun {
  std::unique_ptr<BddManager> mgr;
  std::unique_ptr<VarTable> vars;
  ComposeResult composition;
  GameResult game;
  double dfa_ms = 0.0;       // time to build and compose the automaton
  double fixpoint_ms = 0.0;  // time in the winning-set computation
};

/// Composes f (propositions ordered inputs-then-outputs as declared) and
/// solves the game.  The verdict is independent of the composition mode.
SynthesisRun is_realizable(Formula f, const Partition& p, Thresholds t = {},
                           ComposeMode mode = ComposeMode::Hybrid,
                           const ComposeOptions& options = {},
                           std::uint64_t node_budget =
                               BddManager::kDefaultNodeBudget);

}  // namespace lisaforge
