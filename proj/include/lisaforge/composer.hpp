#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lisaforge/explicit_dfa.hpp"
#include "lisaforge/ltlf.hpp"
#include "lisaforge/symbolic_dfa.hpp"

namespace lisaforge {

enum class ComposeMode { Hybrid, Explicit, Symbolic };

const char* to_string(ComposeMode mode);

/// Switch thresholds: t1 bounds the smallest explicit automaton on the heap,
/// t2 bounds the product of the two smallest.  Explicit-only composition is
/// (unbounded, unbounded); symbolic-only is (0, 0).
struct Thresholds {
  static constexpr std::uint64_t kUnbounded = ~0ull;
  std::uint64_t t1 = 800;
  std::uint64_t t2 = 2500;
};

/// The phase-switch predicate: leave the explicit phase as soon as the
/// smallest automaton alone is too big, or the next pairwise product could
/// be.  Overflow-safe.
bool should_switch(std::uint64_t smallest, std::uint64_t second_smallest,
                   const Thresholds& t);

/// One pairwise composition step, recorded for analysis.  `heap_sizes_before`
/// is the sorted multiset of heap keys right before the two pops, so the
/// smallest-first discipline can be audited after the fact.
struct CompositionEvent {
  enum class Kind { ExplicitPair, SymbolicPair, Encode };
  Kind kind;
  std::uint32_t iteration = 0;  // 1-based over pair events; 0 for encodes
  std::vector<std::uint64_t> heap_sizes_before;
  std::uint64_t popped_a = 0;
  std::uint64_t popped_b = 0;  // unused for Encode
  std::uint64_t pushed = 0;    // minimized states, or T nodes after a switch
  bool minimized = false;
  std::size_t heap_len_after = 0;
  std::uint64_t bdd_nodes = 0;  // manager live nodes after the step
};

struct CompositionLog {
  ComposeMode mode = ComposeMode::Hybrid;
  Thresholds thresholds;
  std::vector<std::uint64_t> seed_sizes;  // conjunct DFA sizes, seed order
  std::vector<CompositionEvent> events;
  std::uint64_t explicit_products = 0;
  std::uint64_t symbolic_products = 0;
  bool switched = false;
  /// Explicit heap keys (ascending) at the moment the switch fired.
  std::vector<std::uint64_t> sizes_at_switch;

  /// One JSON object per line: a header record, every composition/encode
  /// event, and a closing result record.
  void write_jsonl(std::ostream& os, const SymbolicDfa& result) const;
};

struct ComposeOptions {
  ExplicitLimits limits;
};

struct ComposeResult {
  SymbolicDfa dfa;
  CompositionLog log;
  /// The final minimal explicit automaton, present when composition finished
  /// without switching to the symbolic phase.
  std::optional<ExplicitDfa> explicit_final;
};

/// Composes pre-built conjunct automata: repeatedly pops the two smallest
/// from a min-heap, replaces them by their minimised product, and once the
/// switch predicate fires encodes everything left and finishes the same way
/// on a min-heap keyed by transition-relation node count (no minimisation
/// there).  Mode Explicit forces thresholds to unbounded, Symbolic to zero.
ComposeResult compose_dfas(std::vector<ExplicitDfa> parts, VarTable& vars,
                           Thresholds t, ComposeMode mode,
                           const ComposeOptions& options = {});

/// Splits f into top-level conjuncts, converts each to a minimal explicit
/// automaton, and composes.  Propositions of f are registered with the
/// VarTable up front (in sorted order) unless already present.
ComposeResult compose(Formula f, VarTable& vars, Thresholds t,
                      ComposeMode mode, const ComposeOptions& options = {});

}  // namespace lisaforge
