#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lisaforge/ltlf.hpp"

namespace lisaforge {

/// One ready-to-run synthesis problem: a formula, its input/output split,
/// and enough metadata to name output files deterministically.
struct BenchmarkInstance {
  std::string name;
  std::string family;  // counter | double_counter | nim | random
  Formula formula;
  Partition partition;
  std::vector<std::pair<std::string, std::uint64_t>> parameters;
};

/// Binary up-counter the controller drives from 0 to all-ones.  Outputs
/// c_0..c_{n-1}, no inputs: the formula pins position 0 to zero and demands
/// the increment law hold until the counter shows the maximum,
///   at0 ∧ (step U max)
/// with step_j = X c_j ↔ (c_j xor carry_j) and the carry chain expanded to
/// plain connectives.  With `with_inc` an `inc` input gates the law: the
/// counter must step exactly when signalled and hold otherwise, and the
/// obligation discharges if the environment stops signalling.
/// Valid for 1 <= n <= 20; throws std::out_of_range otherwise.
BenchmarkInstance gen_counter(std::size_t n, FormulaArena& arena,
                              bool with_inc = false);

/// Pursuit between two n-bit counters.  The controller's counter (outputs
/// c_j) starts at zero and increments unconditionally, as in gen_counter.
/// The environment owns a second counter (inputs e_j) it may start anywhere,
/// plus an `add` signal that bumps it by one, saturating at the maximum; the
/// law tying X e_j to that behaviour is part of the objective's discharge
/// condition.  The controller wins when its counter value equals the
/// environment's, or when the environment breaks its own counter law:
///   at0(c) ∧ (cstep U (match ∨ ¬estep))
/// Valid for 1 <= n <= 10; throws std::out_of_range otherwise.
BenchmarkInstance gen_double_counter(std::size_t n, FormulaArena& arena);

/// Nim with `heaps` heaps of `tokens` tokens; the environment moves first
/// and the two moves of a round share one trace position (environment's
/// heap/amount bits are inputs, the controller's are outputs).  Heap
/// contents are outputs bound by a published-ledger law: position 0 shows
/// every heap full and each X-step shows the contents after both removals.
/// The controller wins at the first position where it empties the last
/// token (or the environment plays an illegal move, which concedes);
/// an illegal controller move forfeits.  Valid for 1 <= heaps <= 3 and
/// 1 <= tokens <= 3; throws std::out_of_range otherwise.
BenchmarkInstance gen_nim(std::size_t heaps, std::size_t tokens,
                          FormulaArena& arena);

/// Seeded grammar fuzzer over atoms p0..p{num_props-1}: uniform production
/// choice at every node, leaves at depth 1 (an atom or a constant).  The
/// partition alternates the atoms, even indices as inputs.  The same seed
/// always yields the same instance.
BenchmarkInstance gen_random(std::size_t depth, std::size_t num_props,
                             std::uint64_t seed, FormulaArena& arena);

/// `.ltlf` file body: a comment line naming the instance, then the formula.
std::string ltlf_file_text(const BenchmarkInstance& inst);

/// `.part` file body for any partition.
std::string part_file_text(const Partition& p);

}  // namespace lisaforge
