#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lisaforge/errors.hpp"
#include "lisaforge/ltlf.hpp"

namespace lisaforge {

/// Complete deterministic automaton over the alphabet 2^support.  Letters are
/// bitmasks: bit i is the truth value of support[i] (support is sorted).
/// The empty word is in the language iff the initial state is accepting.
struct ExplicitDfa {
  std::vector<std::string> support;
  std::uint32_t initial = 0;
  std::vector<char> accepting;          // indexed by state
  std::vector<std::uint32_t> delta;     // delta[s * num_letters() + letter]

  std::uint32_t num_states() const {
    return static_cast<std::uint32_t>(accepting.size());
  }
  std::uint32_t num_letters() const {
    return 1u << static_cast<std::uint32_t>(support.size());
  }
  std::uint32_t next(std::uint32_t state, std::uint32_t letter) const {
    return delta[std::uint64_t(state) * num_letters() + letter];
  }
  bool is_accepting(std::uint32_t state) const {
    return accepting[state] != 0;
  }
  /// Bitmask of the letter over this automaton's support; atoms outside the
  /// support are ignored.
  std::uint32_t letter_index(const Letter& letter) const;
};

/// Caps for explicit construction.  `max_states` bounds the number of
/// automaton states; `max_table_entries` bounds states * letters, since the
/// transition table is materialised densely.
struct ExplicitLimits {
  std::uint64_t max_states = 1'000'000;
  std::uint64_t max_table_entries = 1ull << 25;
};

/// Builds the minimal DFA of an LTLf formula by progression: states are
/// residual formulas, canonicalised as decision diagrams over the atoms and
/// the temporal subformulas (treated as opaque variables), so propositionally
/// equivalent residuals collapse into one state.  A state accepts iff its
/// residual holds on the empty remainder of the trace.  The result is
/// minimised and breadth-first renumbered.  Throws BudgetExceeded when the
/// limits trip.
ExplicitDfa from_ltlf(Formula f, const ExplicitLimits& limits = {});

/// Hopcroft partition refinement; prunes unreachable states first and
/// renumbers the quotient breadth-first, so equal-language inputs with equal
/// support yield identical structures.
ExplicitDfa minimize(const ExplicitDfa& d);

/// Synchronous product recognising the intersection over the union support.
/// Only reachable pairs are materialised.
ExplicitDfa product(const ExplicitDfa& a, const ExplicitDfa& b,
                    const ExplicitLimits& limits = {});

/// Language equality over the union alphabet, empty word included.
bool equivalent(const ExplicitDfa& a, const ExplicitDfa& b);

/// Membership of a (possibly empty) trace; atoms outside the support are
/// ignored, atoms of the support missing from a letter read false.
bool accepts(const ExplicitDfa& d, const Trace& w);

/// Reachable part of d with states renumbered in breadth-first discovery
/// order (letters scanned in increasing index); the initial state becomes 0.
ExplicitDfa renumber_bfs(const ExplicitDfa& d);

/// Graphviz rendering: one edge per letter, labelled as a conjunction of
/// literals; accepting states are drawn with a double circle.
void to_dot(const ExplicitDfa& d, std::ostream& os);

}  // namespace lisaforge
