#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lisaforge/bdd.hpp"
#include "lisaforge/explicit_dfa.hpp"
#include "lisaforge/ltlf.hpp"

namespace lisaforge {

/// Shared registry of decision-diagram variables.  Proposition variables are
/// global per manager (one per atom name); state variable pairs (z, z') are
/// allocated fresh per encoded automaton, interleaved so a variable and its
/// primed copy sit next to each other in the order.  Register propositions
/// before encoding anything if a specific prefix order (e.g. the `.part`
/// order) is wanted; otherwise they are created on first use.
class VarTable {
 public:
  explicit VarTable(BddManager& mgr) : mgr_(&mgr) {}

  BddManager& manager() { return *mgr_; }

  /// Variable id of a proposition, registering it at the bottom of the
  /// current order when new.
  std::uint32_t prop_var(const std::string& name);
  bool has_prop(const std::string& name) const {
    return props_.count(name) > 0;
  }
  std::vector<std::uint32_t> prop_vars(const std::vector<std::string>& names);

  /// Allocates n fresh (z, z') pairs; `tag` only decorates variable names.
  std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>
  new_state_vars(std::size_t n, std::string_view tag);

 private:
  BddManager* mgr_;
  std::unordered_map<std::string, std::uint32_t> props_;
};

/// Deterministic automaton in symbolic form: initial-state predicate S(Z),
/// transition relation T(Z, P, Z'), accepting predicate F(Z).  Unused state
/// codes are unconstrained in T (they have no outgoing rows) and excluded
/// from F, so they never affect reachable behaviour.
struct SymbolicDfa {
  BddManager* mgr = nullptr;
  std::vector<std::uint32_t> state_vars;   // Z
  std::vector<std::uint32_t> primed_vars;  // Z', aligned with state_vars
  std::vector<std::string> prop_names;     // sorted; aligned with prop_vars
  std::vector<std::uint32_t> prop_vars;
  BddRef init;
  BddRef trans;
  BddRef accepting;
  /// Product of the explicit sizes this automaton was built from (saturates).
  std::uint64_t state_count_hint = 0;

  std::size_t num_state_vars() const { return state_vars.size(); }
};

/// Binary encoding of an explicit automaton: states are renumbered
/// breadth-first, state s is the binary value of its id over
/// max(1, ceil(log2 |S|)) fresh variables (bit j on z_j), so the initial
/// state 0 gives S(Z) = conjunction of negated state variables.
SymbolicDfa encode(const ExplicitDfa& d, VarTable& vars, std::string_view tag);

/// Synchronous product: conjunction of the three predicates over the
/// concatenated state variables and the union of the propositions.
SymbolicDfa symbolic_product(const SymbolicDfa& a, const SymbolicDfa& b);

/// Membership of a (possibly empty) trace, computed by symbolic image steps.
bool symbolic_accepts(const SymbolicDfa& s, const Trace& w);

/// Reachable explicit automaton of a symbolic one (support = prop_names).
/// Used for cross-checks and rendering; throws BudgetExceeded on the usual
/// explicit caps.
ExplicitDfa to_explicit(const SymbolicDfa& s, const ExplicitLimits& limits = {});

}  // namespace lisaforge
