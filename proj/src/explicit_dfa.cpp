#include "lisaforge/explicit_dfa.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "lisaforge/bdd.hpp"

namespace lisaforge {

std::uint32_t ExplicitDfa::letter_index(const Letter& letter) const {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (letter.count(support[i])) mask |= 1u << i;
  }
  return mask;
}

namespace {

void check_limits(std::uint64_t states, std::uint32_t support_size,
                  const ExplicitLimits& limits) {
  if (states > limits.max_states) {
    throw BudgetExceeded(BudgetExceeded::Kind::ExplicitStates,
                         limits.max_states);
  }
  if (support_size >= 25 ||
      states * (1ull << support_size) > limits.max_table_entries) {
    throw BudgetExceeded(BudgetExceeded::Kind::ExplicitStates,
                         limits.max_states);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Progression construction
// ---------------------------------------------------------------------------

namespace {

/// Canonicaliser for residual formulas: maps a formula to a decision diagram
/// over one variable per atom and per temporal subformula.  Boolean structure
/// is interpreted; temporal nodes are opaque.  Each variable carries the
/// value its formula takes on the empty remainder, so evaluating a residual's
/// diagram under those values decides acceptance.
class ResidualCanon {
 public:
  ResidualCanon() : mgr_(BddManager::kDefaultNodeBudget) {}

  BddRef to_bdd(Formula f) {
    auto it = bdd_memo_.find(f.id());
    if (it != bdd_memo_.end()) return it->second;
    BddRef r;
    switch (f.op()) {
      case Op::True:
        r = mgr_.one();
        break;
      case Op::False:
        r = mgr_.zero();
        break;
      case Op::Not:
        r = !to_bdd(f.child(0));
        break;
      case Op::And: {
        r = mgr_.one();
        for (Formula c : f.children()) r = r & to_bdd(c);
        break;
      }
      case Op::Or: {
        r = mgr_.zero();
        for (Formula c : f.children()) r = r | to_bdd(c);
        break;
      }
      default:
        r = mgr_.var(var_for(f));
        break;
    }
    bdd_memo_.emplace(f.id(), r);
    return r;
  }

  /// Truth value of the residual on the empty remainder of a trace.
  bool empty_value(const BddRef& b) {
    std::vector<bool> values(mgr_.num_vars());
    for (std::size_t v = 0; v < values.size(); ++v) {
      values[v] = empty_value_of_var_[v] != 0;
    }
    return mgr_.eval(b, values);
  }

 private:
  std::uint32_t var_for(Formula f) {
    auto it = var_memo_.find(f.id());
    if (it != var_memo_.end()) return it->second;
    // On the empty remainder an atom or strong-Next/Until/Finally obligation
    // fails, while Release/Globally obligations hold vacuously.
    bool empty_value;
    switch (f.op()) {
      case Op::Release:
      case Op::Globally:
        empty_value = true;
        break;
      default:
        empty_value = false;
        break;
    }
    std::uint32_t v = mgr_.new_var(
        f.op() == Op::Atom ? f.name() : "t" + std::to_string(f.id()));
    var_memo_.emplace(f.id(), v);
    empty_value_of_var_.push_back(empty_value ? 1 : 0);
    return v;
  }

  BddManager mgr_;
  std::unordered_map<std::uint32_t, BddRef> bdd_memo_;
  std::unordered_map<std::uint32_t, std::uint32_t> var_memo_;
  std::vector<char> empty_value_of_var_;
};

/// One progression step: the residual that must hold on the rest of the
/// trace after reading `sigma` (given as a bitmask over `support`).
class Progressor {
 public:
  Progressor(FormulaArena& arena, const std::vector<std::string>& support)
      : arena_(arena) {
    for (std::size_t i = 0; i < support.size(); ++i) {
      atom_bit_.emplace(support[i], i);
    }
  }

  Formula step(Formula f, std::uint32_t sigma) {
    memo_.clear();
    sigma_ = sigma;
    return rec(f);
  }

 private:
  Formula rec(Formula f) {
    auto it = memo_.find(f.id());
    if (it != memo_.end()) return it->second;
    Formula r;
    switch (f.op()) {
      case Op::True:
      case Op::False:
        r = f;
        break;
      case Op::Atom: {
        std::size_t bit = atom_bit_.at(f.name());
        r = arena_.constant((sigma_ >> bit) & 1u);
        break;
      }
      case Op::Not:
        r = arena_.make_not(rec(f.child(0)));
        break;
      case Op::And: {
        std::vector<Formula> kids;
        kids.reserve(f.num_children());
        for (Formula c : f.children()) kids.push_back(rec(c));
        r = arena_.make_and(std::move(kids));
        break;
      }
      case Op::Or: {
        std::vector<Formula> kids;
        kids.reserve(f.num_children());
        for (Formula c : f.children()) kids.push_back(rec(c));
        r = arena_.make_or(std::move(kids));
        break;
      }
      case Op::Next:
        // Strong Next: the operand must hold on a *nonempty* remainder.  The
        // marker conjunct records that; without it a residual whose operand
        // holds vacuously on the empty remainder (say `X G a`) would accept a
        // trace that stops right after sigma.
        r = arena_.make_and(f.child(0),
                            arena_.make_not(arena_.empty_trace_marker()));
        break;
      case Op::Until:
        // l U r steps to prog(r) | (prog(l) & (l U r))
        r = arena_.make_or(
            rec(f.child(1)),
            arena_.make_and(rec(f.child(0)), f));
        break;
      case Op::Release:
        r = arena_.make_and(
            rec(f.child(1)),
            arena_.make_or(rec(f.child(0)), f));
        break;
      case Op::Finally:
        r = arena_.make_or(rec(f.child(0)), f);
        break;
      case Op::Globally:
        r = arena_.make_and(rec(f.child(0)), f);
        break;
      default:
        throw std::logic_error("unreachable");
    }
    memo_.emplace(f.id(), r);
    return r;
  }

  FormulaArena& arena_;
  std::unordered_map<std::string, std::size_t> atom_bit_;
  std::unordered_map<std::uint32_t, Formula> memo_;
  std::uint32_t sigma_ = 0;
};

}  // namespace

ExplicitDfa from_ltlf(Formula f, const ExplicitLimits& limits) {
  ExplicitDfa d;
  {
    std::set<std::string> props = propositions(f);
    d.support.assign(props.begin(), props.end());
  }
  check_limits(1, static_cast<std::uint32_t>(d.support.size()), limits);
  const std::uint32_t letters = d.num_letters();

  ResidualCanon canon;
  Progressor prog(*f.arena(), d.support);

  struct State {
    Formula residual;  // first representative seen for this diagram
    BddRef diagram;    // pins the diagram in the canonicaliser
  };
  std::vector<State> states;
  std::unordered_map<std::uint32_t, std::uint32_t> state_of_diagram;

  auto intern = [&](Formula residual) {
    BddRef diagram = canon.to_bdd(residual);
    auto it = state_of_diagram.find(diagram.id());
    if (it != state_of_diagram.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(states.size());
    check_limits(id + 1, static_cast<std::uint32_t>(d.support.size()), limits);
    state_of_diagram.emplace(diagram.id(), id);
    d.accepting.push_back(canon.empty_value(diagram) ? 1 : 0);
    states.push_back(State{residual, std::move(diagram)});
    return id;
  };

  intern(f);
  d.initial = 0;
  for (std::uint32_t s = 0; s < states.size(); ++s) {
    Formula residual = states[s].residual;
    for (std::uint32_t m = 0; m < letters; ++m) {
      std::uint32_t t = intern(prog.step(residual, m));
      d.delta.push_back(t);
    }
  }
  assert(d.delta.size() ==
         std::uint64_t(states.size()) * letters);
  return minimize(d);
}

// ---------------------------------------------------------------------------
// Reachability and renumbering
// ---------------------------------------------------------------------------

ExplicitDfa renumber_bfs(const ExplicitDfa& d) {
  const std::uint32_t letters = d.num_letters();
  std::vector<std::uint32_t> order;                     // new id -> old id
  std::vector<std::uint32_t> new_id(d.num_states(), 0xffffffffu);
  std::deque<std::uint32_t> queue;
  new_id[d.initial] = 0;
  order.push_back(d.initial);
  queue.push_back(d.initial);
  while (!queue.empty()) {
    std::uint32_t s = queue.front();
    queue.pop_front();
    for (std::uint32_t m = 0; m < letters; ++m) {
      std::uint32_t t = d.next(s, m);
      if (new_id[t] == 0xffffffffu) {
        new_id[t] = static_cast<std::uint32_t>(order.size());
        order.push_back(t);
        queue.push_back(t);
      }
    }
  }
  ExplicitDfa out;
  out.support = d.support;
  out.initial = 0;
  out.accepting.reserve(order.size());
  out.delta.reserve(std::uint64_t(order.size()) * letters);
  for (std::uint32_t old : order) {
    out.accepting.push_back(d.accepting[old]);
    for (std::uint32_t m = 0; m < letters; ++m) {
      out.delta.push_back(new_id[d.next(old, m)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minimisation (Hopcroft)
// ---------------------------------------------------------------------------

ExplicitDfa minimize(const ExplicitDfa& d_in) {
  ExplicitDfa d = renumber_bfs(d_in);  // prune unreachable states
  const std::uint32_t n = d.num_states();
  const std::uint32_t k = d.num_letters();
  if (n <= 1) return d;

  // Inverse transition relation, one CSR layout per letter.
  std::vector<std::vector<std::uint32_t>> inv_off(
      k, std::vector<std::uint32_t>(n + 1, 0));
  std::vector<std::vector<std::uint32_t>> inv(k);
  for (std::uint32_t c = 0; c < k; ++c) {
    auto& off = inv_off[c];
    for (std::uint32_t s = 0; s < n; ++s) ++off[d.next(s, c) + 1];
    for (std::uint32_t t = 0; t < n; ++t) off[t + 1] += off[t];
    inv[c].resize(n);
    std::vector<std::uint32_t> cursor(off.begin(), off.end() - 1);
    for (std::uint32_t s = 0; s < n; ++s) {
      inv[c][cursor[d.next(s, c)]++] = s;
    }
  }

  // Partition as a permutation of states grouped per block.
  std::vector<std::uint32_t> part(n), loc(n), blk(n);
  std::vector<std::uint32_t> first, past, marked_count;
  auto block_size = [&](std::uint32_t b) { return past[b] - first[b]; };

  {
    std::uint32_t acc = 0;
    for (std::uint32_t s = 0; s < n; ++s) acc += d.is_accepting(s) ? 1 : 0;
    std::uint32_t ia = 0, ir = acc;  // accepting first, then rejecting
    bool two_blocks = acc != 0 && acc != n;
    for (std::uint32_t s = 0; s < n; ++s) {
      std::uint32_t pos = d.is_accepting(s) ? ia++ : ir++;
      part[pos] = s;
      loc[s] = pos;
      blk[s] = (two_blocks && !d.is_accepting(s)) ? 1 : 0;
    }
    if (two_blocks) {
      first = {0, acc};
      past = {acc, n};
    } else {
      first = {0};
      past = {n};
    }
    marked_count = std::vector<std::uint32_t>(first.size(), 0);
  }

  // Worklist of (block, letter) splitters.
  std::deque<std::pair<std::uint32_t, std::uint32_t>> work;
  std::vector<char> in_work;  // indexed block * k + letter
  auto ensure_flags = [&](std::size_t blocks) {
    in_work.resize(blocks * k, 0);
  };
  auto push_work = [&](std::uint32_t b, std::uint32_t c) {
    if (!in_work[std::size_t(b) * k + c]) {
      in_work[std::size_t(b) * k + c] = 1;
      work.emplace_back(b, c);
    }
  };
  ensure_flags(first.size());
  for (std::uint32_t c = 0; c < k; ++c) {
    if (first.size() == 1) {
      push_work(0, c);
    } else {
      push_work(block_size(0) <= block_size(1) ? 0 : 1, c);
    }
  }

  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> splitter_states;
  while (!work.empty()) {
    auto [splitter, c] = work.front();
    work.pop_front();
    in_work[std::size_t(splitter) * k + c] = 0;

    // Snapshot the splitter's members: marking may permute `part` inside the
    // splitter's own range when a block splits against itself.
    splitter_states.assign(part.begin() + first[splitter],
                           part.begin() + past[splitter]);

    // Mark predecessors of the splitter block under letter c by moving them
    // to the front of their own block.
    touched.clear();
    for (std::uint32_t t : splitter_states) {
      for (std::uint32_t j = inv_off[c][t]; j < inv_off[c][t + 1]; ++j) {
        std::uint32_t s = inv[c][j];
        std::uint32_t b = blk[s];
        if (loc[s] < first[b] + marked_count[b]) continue;  // already marked
        if (marked_count[b] == 0) touched.push_back(b);
        std::uint32_t dest = first[b] + marked_count[b];
        std::uint32_t other = part[dest];
        std::swap(part[loc[s]], part[dest]);
        loc[other] = loc[s];
        loc[s] = dest;
        ++marked_count[b];
      }
    }

    for (std::uint32_t b : touched) {
      std::uint32_t marked = marked_count[b];
      marked_count[b] = 0;
      if (marked == block_size(b)) continue;  // nothing separated

      // Carve the marked prefix out as a new block.
      std::uint32_t nb = static_cast<std::uint32_t>(first.size());
      first.push_back(first[b]);
      past.push_back(first[b] + marked);
      marked_count.push_back(0);
      first[b] += marked;
      for (std::uint32_t i = first[nb]; i < past[nb]; ++i) blk[part[i]] = nb;
      ensure_flags(first.size());

      for (std::uint32_t e = 0; e < k; ++e) {
        if (in_work[std::size_t(b) * k + e]) {
          // Old block is still queued for e: both halves must be processed.
          push_work(nb, e);
        } else {
          push_work(block_size(nb) <= block_size(b) ? nb : b, e);
        }
      }
    }
  }

  // Quotient automaton, then canonical renumbering.
  ExplicitDfa q;
  q.support = d.support;
  q.initial = blk[d.initial];
  q.accepting.resize(first.size());
  q.delta.resize(std::uint64_t(first.size()) * k);
  for (std::uint32_t b = 0; b < first.size(); ++b) {
    std::uint32_t rep = part[first[b]];
    q.accepting[b] = d.accepting[rep];
    for (std::uint32_t c = 0; c < k; ++c) {
      q.delta[std::uint64_t(b) * k + c] = blk[d.next(rep, c)];
    }
  }
  return renumber_bfs(q);
}

// ---------------------------------------------------------------------------
// Products and comparisons
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> union_support(const ExplicitDfa& a,
                                       const ExplicitDfa& b) {
  std::vector<std::string> out = a.support;
  out.insert(out.end(), b.support.begin(), b.support.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Bit positions of an operand's support atoms within the union support.
std::vector<std::uint32_t> projection_bits(
    const std::vector<std::string>& union_sup,
    const std::vector<std::string>& operand_sup) {
  std::vector<std::uint32_t> src;
  src.reserve(operand_sup.size());
  for (const std::string& name : operand_sup) {
    auto it = std::lower_bound(union_sup.begin(), union_sup.end(), name);
    src.push_back(static_cast<std::uint32_t>(it - union_sup.begin()));
  }
  return src;
}

std::uint32_t project_letter(std::uint32_t union_letter,
                             const std::vector<std::uint32_t>& src) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    m |= ((union_letter >> src[i]) & 1u) << i;
  }
  return m;
}

}  // namespace

ExplicitDfa product(const ExplicitDfa& a, const ExplicitDfa& b,
                    const ExplicitLimits& limits) {
  ExplicitDfa out;
  out.support = union_support(a, b);
  check_limits(1, static_cast<std::uint32_t>(out.support.size()), limits);
  const std::uint32_t letters = out.num_letters();
  std::vector<std::uint32_t> src_a = projection_bits(out.support, a.support);
  std::vector<std::uint32_t> src_b = projection_bits(out.support, b.support);

  std::unordered_map<std::uint64_t, std::uint32_t> pair_id;
  std::vector<std::uint64_t> pairs;
  auto intern = [&](std::uint32_t sa, std::uint32_t sb) {
    std::uint64_t key = (std::uint64_t(sa) << 32) | sb;
    auto it = pair_id.find(key);
    if (it != pair_id.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(pairs.size());
    check_limits(id + 1, static_cast<std::uint32_t>(out.support.size()),
                 limits);
    pair_id.emplace(key, id);
    pairs.push_back(key);
    out.accepting.push_back(
        (a.is_accepting(sa) && b.is_accepting(sb)) ? 1 : 0);
    return id;
  };

  intern(a.initial, b.initial);
  out.initial = 0;
  for (std::uint32_t s = 0; s < pairs.size(); ++s) {
    std::uint32_t sa = static_cast<std::uint32_t>(pairs[s] >> 32);
    std::uint32_t sb = static_cast<std::uint32_t>(pairs[s] & 0xffffffffu);
    for (std::uint32_t m = 0; m < letters; ++m) {
      std::uint32_t t = intern(a.next(sa, project_letter(m, src_a)),
                               b.next(sb, project_letter(m, src_b)));
      out.delta.push_back(t);
    }
  }
  return out;
}

bool equivalent(const ExplicitDfa& a, const ExplicitDfa& b) {
  std::vector<std::string> sup = union_support(a, b);
  if (sup.size() >= 25) {
    throw BudgetExceeded(BudgetExceeded::Kind::ExplicitStates,
                         ExplicitLimits{}.max_states);
  }
  const std::uint32_t letters = 1u << sup.size();
  std::vector<std::uint32_t> src_a = projection_bits(sup, a.support);
  std::vector<std::uint32_t> src_b = projection_bits(sup, b.support);

  std::unordered_set<std::uint64_t> seen;
  std::deque<std::pair<std::uint32_t, std::uint32_t>> queue;
  auto visit = [&](std::uint32_t sa, std::uint32_t sb) {
    std::uint64_t key = (std::uint64_t(sa) << 32) | sb;
    if (seen.insert(key).second) queue.emplace_back(sa, sb);
  };
  visit(a.initial, b.initial);
  while (!queue.empty()) {
    auto [sa, sb] = queue.front();
    queue.pop_front();
    if (a.is_accepting(sa) != b.is_accepting(sb)) return false;
    for (std::uint32_t m = 0; m < letters; ++m) {
      visit(a.next(sa, project_letter(m, src_a)),
            b.next(sb, project_letter(m, src_b)));
    }
  }
  return true;
}

bool accepts(const ExplicitDfa& d, const Trace& w) {
  std::uint32_t s = d.initial;
  for (const Letter& letter : w) {
    s = d.next(s, d.letter_index(letter));
  }
  return d.is_accepting(s);
}

// ---------------------------------------------------------------------------
// Graphviz export
// ---------------------------------------------------------------------------

void to_dot(const ExplicitDfa& d, std::ostream& os) {
  os << "digraph dfa {\n  rankdir=LR;\n  node [shape=circle];\n"
     << "  init [shape=point];\n";
  for (std::uint32_t s = 0; s < d.num_states(); ++s) {
    os << "  q" << s;
    if (d.is_accepting(s)) os << " [shape=doublecircle]";
    os << ";\n";
  }
  os << "  init -> q" << d.initial << ";\n";
  const std::uint32_t letters = d.num_letters();
  for (std::uint32_t s = 0; s < d.num_states(); ++s) {
    for (std::uint32_t m = 0; m < letters; ++m) {
      os << "  q" << s << " -> q" << d.next(s, m) << " [label=\"";
      if (d.support.empty()) {
        os << "true";
      } else {
        for (std::size_t i = 0; i < d.support.size(); ++i) {
          if (i) os << " & ";
          if (!((m >> i) & 1u)) os << "!";
          os << d.support[i];
        }
      }
      os << "\"];\n";
    }
  }
  os << "}\n";
}

}  // namespace lisaforge
