#include "support.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "lisaforge/bench.hpp"

namespace lisaforge::testsupport {

// -- corpus -----------------------------------------------------------------

Partition alternating_partition(const std::set<std::string>& props) {
  Partition p;
  std::size_t i = 0;
  for (const std::string& name : props) {
    (i++ % 2 == 0 ? p.inputs : p.outputs).push_back(name);
  }
  return p;
}

std::vector<CorpusEntry> corpus() {
  // Hand-written half: every connective, both polarities of Next, the
  // trace-end edge cases, and a few nested shapes.  Atoms stay within
  // {a, b, c} so exhaustive word enumeration is cheap.
  static const struct {
    const char* name;
    const char* text;
  } handwritten[] = {
      {"atom", "a"},
      {"negated-atom", "!a"},
      {"const-true", "true"},
      {"const-false", "false"},
      {"conjunction", "a & b"},
      {"disjunction", "a | b"},
      {"implication", "a -> b"},
      {"equivalence", "a <-> b"},
      {"next", "X a"},
      {"weak-next", "!X!a"},
      {"next-negated", "X !a"},
      {"next-globally", "X G a"},
      {"double-next", "X X a"},
      {"until", "a U b"},
      {"negated-until", "!(a U b)"},
      {"nested-until", "a U (b U c)"},
      {"until-next-rhs", "a U X b"},
      {"finally", "F a"},
      {"globally", "G a"},
      {"response", "G(a -> F b)"},
      {"last-position", "G F a"},
      {"stabilize", "F G a"},
      {"step-law", "G(a -> X b)"},
      {"two-goals", "F a & F b"},
      {"either-goal", "F(a | b)"},
      {"goal-or-now", "(F a & G b) | c"},
      {"eventually-pair", "F(a & X b)"},
      {"until-of-pair", "a U (b & X c)"},
      {"alternation", "G(a <-> X a)"},
      {"guarded-chain", "G((a & X b) -> X X c)"},
  };

  std::vector<CorpusEntry> out;
  for (const auto& e : handwritten) {
    FormulaArena arena;
    Formula f = parse(e.text, arena);
    out.push_back({std::string("hand-") + e.name, e.text,
                   alternating_partition(propositions(f))});
  }

  // Fuzzed half: seeded generator instances, depth 2..4 over 2..3 atoms.
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    FormulaArena arena;
    BenchmarkInstance inst =
        gen_random(2 + seed % 3, 2 + seed % 2, seed, arena);
    out.push_back({inst.name, to_string(inst.formula), inst.partition});
  }
  return out;
}

// -- word enumeration -------------------------------------------------------

std::vector<Letter> letters_over(const std::vector<std::string>& props) {
  std::vector<Letter> letters;
  letters.reserve(std::size_t{1} << props.size());
  for (std::size_t mask = 0; mask < (std::size_t{1} << props.size()); ++mask) {
    Letter l;
    for (std::size_t i = 0; i < props.size(); ++i) {
      if (mask >> i & 1) l.insert(props[i]);
    }
    letters.push_back(std::move(l));
  }
  return letters;
}

void for_each_word(const std::vector<std::string>& props, std::size_t max_len,
                   const std::function<void(const Trace&)>& visit) {
  const std::vector<Letter> letters = letters_over(props);
  Trace buffer;
  auto rec = [&](auto&& self, std::size_t remaining) -> void {
    if (remaining == 0) return;
    for (const Letter& l : letters) {
      buffer.push_back(l);
      visit(buffer);
      self(self, remaining - 1);
      buffer.pop_back();
    }
  };
  rec(rec, max_len);
}

// -- explicit game oracle ---------------------------------------------------

GameOracle solve_by_backward_induction(const ExplicitDfa& d,
                                       const Partition& p) {
  std::vector<std::size_t> in_bits, out_bits;
  for (std::size_t i = 0; i < d.support.size(); ++i) {
    if (p.is_input(d.support[i])) {
      in_bits.push_back(i);
    } else if (p.is_output(d.support[i])) {
      out_bits.push_back(i);
    } else {
      throw std::invalid_argument("oracle: unpartitioned proposition: " +
                                  d.support[i]);
    }
  }
  auto spread = [](const std::vector<std::size_t>& bits, std::uint32_t packed) {
    std::uint32_t mask = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if (packed >> j & 1) mask |= 1u << bits[j];
    }
    return mask;
  };

  const std::uint32_t in_count = 1u << in_bits.size();
  const std::uint32_t out_count = 1u << out_bits.size();
  std::vector<char> win(d.accepting.begin(), d.accepting.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t s = 0; s < d.num_states(); ++s) {
      if (win[s]) continue;
      bool every_input = true;
      for (std::uint32_t im = 0; im < in_count && every_input; ++im) {
        bool some_output = false;
        for (std::uint32_t om = 0; om < out_count && !some_output; ++om) {
          const std::uint32_t letter =
              spread(in_bits, im) | spread(out_bits, om);
          some_output = win[d.next(s, letter)] != 0;
        }
        every_input = some_output;
      }
      if (every_input) {
        win[s] = 1;
        changed = true;
      }
    }
  }
  return {win[d.initial] != 0, std::move(win)};
}

// -- symbolic walking and strategy checking ---------------------------------

SymbolicWalker::SymbolicWalker(const SymbolicDfa& d) : dfa_(&d) {}

std::vector<bool> SymbolicWalker::initial() const {
  auto bits = dfa_->mgr->any_sat(dfa_->init, dfa_->state_vars);
  if (!bits) throw std::logic_error("walker: initial predicate is empty");
  return *bits;
}

bool SymbolicWalker::accepting(const std::vector<bool>& state_bits) const {
  std::vector<bool> values(dfa_->mgr->num_vars(), false);
  for (std::size_t i = 0; i < dfa_->state_vars.size(); ++i) {
    values[dfa_->state_vars[i]] = state_bits[i];
  }
  return dfa_->mgr->eval(dfa_->accepting, values);
}

std::vector<bool> SymbolicWalker::step(const std::vector<bool>& state_bits,
                                       const Letter& letter) const {
  BddManager& m = *dfa_->mgr;
  BddRef row = dfa_->trans;
  for (std::size_t i = 0; i < dfa_->state_vars.size(); ++i) {
    row = m.restrict_var(row, dfa_->state_vars[i], state_bits[i]);
  }
  for (std::size_t i = 0; i < dfa_->prop_names.size(); ++i) {
    row = m.restrict_var(row, dfa_->prop_vars[i],
                         letter.count(dfa_->prop_names[i]) > 0);
  }
  auto next = m.any_sat(row, dfa_->primed_vars);
  if (!next) throw std::logic_error("walker: state has no successor row");
  return *next;
}

std::optional<std::string> strategy_counterexample(const Strategy& s,
                                                   std::size_t horizon) {
  SymbolicWalker walker(s.automaton());
  const std::vector<Letter> input_letters = letters_over(s.input_names());
  const std::vector<std::string>& out_names = s.output_names();

  // Status 0 = on the DFS stack, 1 = finished; `need` is the worst-case
  // number of rounds to reach acceptance from a finished state.
  std::map<std::vector<bool>, int> status;
  std::map<std::vector<bool>, std::size_t> need;

  auto visit = [&](auto&& self,
                   const std::vector<bool>& state) -> std::optional<std::string> {
    if (walker.accepting(state)) {
      need[state] = 0;
      status[state] = 1;
      return std::nullopt;
    }
    if (auto it = status.find(state); it != status.end()) {
      if (it->second == 0) {
        return std::string("a play can cycle without ever accepting");
      }
      return std::nullopt;
    }
    status[state] = 0;
    std::size_t worst = 0;
    for (const Letter& inputs : input_letters) {
      std::vector<bool> outs = s.choose(state, inputs);
      Letter combined = inputs;
      for (std::size_t i = 0; i < out_names.size(); ++i) {
        if (outs[i]) combined.insert(out_names[i]);
      }
      std::vector<bool> successor = walker.step(state, combined);
      if (auto bad = self(self, successor)) return bad;
      worst = std::max(worst, need[successor] + 1);
    }
    status[state] = 1;
    need[state] = worst;
    return std::nullopt;
  };

  std::vector<bool> init = walker.initial();
  if (auto bad = visit(visit, init)) return bad;
  if (need[init] > horizon) {
    return "worst play needs " + std::to_string(need[init]) +
           " rounds, horizon is " + std::to_string(horizon);
  }
  return std::nullopt;
}

// -- random Boolean expressions ---------------------------------------------

bool BoolExpr::eval(const std::vector<bool>& assignment) const {
  auto rec = [&](auto&& self, int idx) -> bool {
    const Node& n = nodes[idx];
    switch (n.kind) {
      case Kind::Const: return n.value;
      case Kind::Var: return assignment[n.var];
      case Kind::Not: return !self(self, n.a);
      case Kind::And: return self(self, n.a) && self(self, n.b);
      case Kind::Or: return self(self, n.a) || self(self, n.b);
      case Kind::Xor: return self(self, n.a) != self(self, n.b);
      case Kind::Ite:
        return self(self, n.a) ? self(self, n.b) : self(self, n.c);
    }
    return false;
  };
  return rec(rec, root);
}

BoolExpr random_bool_expr(std::size_t num_vars, std::size_t depth,
                          std::mt19937_64& rng) {
  BoolExpr e;
  auto add = [&](BoolExpr::Node n) {
    e.nodes.push_back(n);
    return static_cast<int>(e.nodes.size()) - 1;
  };
  auto build = [&](auto&& self, std::size_t d) -> int {
    if (d == 0 || rng() % 6 == 0) {
      BoolExpr::Node n;
      const std::uint64_t pick = rng() % (num_vars + 2);
      if (pick < num_vars) {
        n.kind = BoolExpr::Kind::Var;
        n.var = pick;
      } else {
        n.kind = BoolExpr::Kind::Const;
        n.value = pick == num_vars;
      }
      return add(n);
    }
    const std::uint64_t op = rng() % 5;
    BoolExpr::Node n;
    n.a = self(self, d - 1);  // children drawn left to right, explicitly
    switch (op) {
      case 0: n.kind = BoolExpr::Kind::Not; break;
      case 1: n.kind = BoolExpr::Kind::And; n.b = self(self, d - 1); break;
      case 2: n.kind = BoolExpr::Kind::Or; n.b = self(self, d - 1); break;
      case 3: n.kind = BoolExpr::Kind::Xor; n.b = self(self, d - 1); break;
      default:
        n.kind = BoolExpr::Kind::Ite;
        n.b = self(self, d - 1);
        n.c = self(self, d - 1);
        break;
    }
    return add(n);
  };
  e.root = build(build, depth);
  return e;
}

BddRef to_bdd(const BoolExpr& e, BddManager& m,
              const std::vector<std::uint32_t>& vars) {
  auto rec = [&](auto&& self, int idx) -> BddRef {
    const BoolExpr::Node& n = e.nodes[idx];
    switch (n.kind) {
      case BoolExpr::Kind::Const: return n.value ? m.one() : m.zero();
      case BoolExpr::Kind::Var: return m.var(vars[n.var]);
      case BoolExpr::Kind::Not: return !self(self, n.a);
      case BoolExpr::Kind::And: return self(self, n.a) & self(self, n.b);
      case BoolExpr::Kind::Or: return self(self, n.a) | self(self, n.b);
      case BoolExpr::Kind::Xor:
        return m.exclusive_or(self(self, n.a), self(self, n.b));
      case BoolExpr::Kind::Ite:
        return m.ite(self(self, n.a), self(self, n.b), self(self, n.c));
    }
    return m.zero();
  };
  return rec(rec, e.root);
}

// -- small automata ---------------------------------------------------------

ExplicitDfa cyclic_counter(std::uint32_t mod, const std::string& atom) {
  ExplicitDfa d;
  d.support = {atom};
  d.initial = 0;
  d.accepting.assign(mod, 0);
  d.accepting[0] = 1;
  d.delta.reserve(std::size_t{2} * mod);
  for (std::uint32_t s = 0; s < mod; ++s) {
    const std::uint32_t t = (s + 1) % mod;
    d.delta.push_back(t);  // atom false
    d.delta.push_back(t);  // atom true
  }
  return d;
}

}  // namespace lisaforge::testsupport
