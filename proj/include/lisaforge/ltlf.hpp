#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lisaforge/errors.hpp"

namespace lisaforge {

class FormulaArena;

/// Connectives of linear temporal logic on finite traces.  Release never
/// appears in surface syntax; it only arises from negation normalisation.
enum class Op : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Next,
  Until,
  Release,
  Finally,
  Globally,
};

/// Lightweight handle into a FormulaArena.  Handles are hash-consed: two
/// handles from the same arena are structurally equal iff they compare equal.
class Formula {
 public:
  Formula() = default;

  Op op() const;
  /// Name of an Atom node; throws for other node kinds.
  const std::string& name() const;
  std::size_t num_children() const;
  Formula child(std::size_t i) const;
  std::vector<Formula> children() const;

  bool is_atom() const { return op() == Op::Atom; }
  bool is_constant() const { return op() == Op::True || op() == Op::False; }
  /// True for Next/Until/Release/Finally/Globally nodes.
  bool is_temporal() const;

  FormulaArena* arena() const { return arena_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return arena_ != nullptr; }

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.arena_ == b.arena_ && a.id_ == b.id_;
  }
  friend bool operator!=(const Formula& a, const Formula& b) {
    return !(a == b);
  }

 private:
  friend class FormulaArena;
  Formula(FormulaArena* arena, std::uint32_t id) : arena_(arena), id_(id) {}

  FormulaArena* arena_ = nullptr;
  std::uint32_t id_ = 0;
};

/// A single position of a finite trace: the set of atoms true there.
using Letter = std::set<std::string>;
/// A finite, nonempty word over 2^AP.
using Trace = std::vector<Letter>;

/// Owns all formula nodes.  Construction goes through the make_* smart
/// constructors, which hash-cons and apply light normalisation:
///   * And/Or flatten nested nodes of the same kind, drop neutral constants,
///     deduplicate children (keeping first-occurrence order), and collapse
///     annihilators;
///   * double negation cancels; negated constants fold;
///   * Until/Release/Finally/Globally absorb constant operands.
/// No other rewriting happens here, so parse trees stay recognisable.
class FormulaArena {
 public:
  FormulaArena();
  FormulaArena(const FormulaArena&) = delete;
  FormulaArena& operator=(const FormulaArena&) = delete;

  Formula constant(bool value);
  Formula atom(std::string_view name);
  Formula make_not(Formula f);
  Formula make_and(std::vector<Formula> children);
  Formula make_or(std::vector<Formula> children);
  Formula make_and(Formula a, Formula b) { return make_and({a, b}); }
  Formula make_or(Formula a, Formula b) { return make_or({a, b}); }
  Formula make_next(Formula f);
  Formula make_until(Formula lhs, Formula rhs);
  Formula make_release(Formula lhs, Formula rhs);
  Formula make_finally(Formula f);
  Formula make_globally(Formula f);

  /// The empty-trace recogniser: a raw `G false` node, kept opaque instead of
  /// folding to `false`.  On any nonempty trace it is false, so it never
  /// changes the meaning of a surface formula, but as a conjunct inside
  /// progression residuals it records "the word may stop here" -- exactly the
  /// boundary information a strong Next has to strip from its operand.  Not
  /// reachable through the ordinary constructors (make_globally folds constant
  /// bodies), so it can never collide with user input.
  Formula empty_trace_marker();

  /// a -> b, desugared immediately.
  Formula make_implies(Formula a, Formula b) {
    return make_or(make_not(a), b);
  }
  /// a <-> b, desugared immediately.
  Formula make_iff(Formula a, Formula b) {
    return make_or(make_and(a, b), make_and(make_not(a), make_not(b)));
  }

  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  friend class Formula;

  struct Node {
    Op op;
    std::uint32_t atom = 0;         // index into atom_names_ for Op::Atom
    std::uint32_t first_child = 0;  // offset into child_pool_
    std::uint32_t num_children = 0;
  };

  struct NodeKey {
    Op op;
    std::uint32_t atom;
    std::vector<std::uint32_t> children;
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const;
  };

  std::uint32_t intern(Op op, std::uint32_t atom,
                       const std::vector<std::uint32_t>& children);
  Formula wrap(std::uint32_t id) { return Formula(this, id); }

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> child_pool_;
  std::vector<std::string> atom_names_;
  std::unordered_map<std::string, std::uint32_t, std::hash<std::string>,
                     std::equal_to<>> atom_ids_;
  std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> intern_table_;
};

/// Parses one formula.  Grammar (loosest to tightest): `<->`, `->`, `|`, `&`,
/// `U`, then the prefix operators `! X F G`; `U` associates to the right.
/// `->` and `<->` are desugared during parsing.  `#` starts a line comment.
/// Release has no surface form and `R` is reported as an unknown token.
Formula parse(std::string_view text, FormulaArena& arena);

/// Minimal-parenthesis rendering; `parse(to_string(f)) == f` for every f.
std::string to_string(Formula f);
std::ostream& operator<<(std::ostream& os, Formula f);

/// Negation normal form: negations sink onto atoms, with one exception --
/// `!X g` is kept as written (on finite words the dual of strong Next is not
/// expressible without a weak-next connective, and progression handles the
/// negated node directly).
Formula to_nnf(Formula f);

/// Evaluates f on a nonempty trace.  Runs a position-indexed dynamic program
/// over the subformula closure, so it is linear in |trace| * |closure| and
/// serves as the reference semantics everything else is checked against.
/// Throws std::invalid_argument on an empty trace.
bool evaluate(const Trace& trace, Formula f);

/// Maximal top-level conjunct list: And nodes at the root are flattened
/// (the arena already flattens nested And), any other root yields a
/// singleton.  Conjoining the result reproduces f.
std::vector<Formula> split_conjuncts(Formula f);

/// All atom names occurring in f, in their canonical (sorted) order.
std::set<std::string> propositions(Formula f);

/// Input/output split of the atoms, as read from a `.part` file.  Order of
/// appearance is preserved; it fixes the default decision-diagram variable
/// order and the tie-break used when picking controller outputs.
struct Partition {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  bool is_input(std::string_view name) const;
  bool is_output(std::string_view name) const;
  /// Throws std::invalid_argument if the two sides share a name.
  void validate() const;
};

/// Reads a `.ltlf` file: `#` comments stripped, remaining text must hold
/// exactly one formula.
Formula read_formula_file(const std::string& path, FormulaArena& arena);

/// Reads a `.part` file with `.inputs:` / `.outputs:` lines.
Partition read_partition_file(const std::string& path);

Partition parse_partition(std::string_view text);

}  // namespace lisaforge
