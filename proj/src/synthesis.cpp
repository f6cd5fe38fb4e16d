#include "lisaforge/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <utility>

namespace lisaforge {

namespace {

// Splits the automaton's propositions into game sides.  Every proposition
// the automaton reads must be declared on one side of the partition.
struct GameVars {
  std::vector<std::uint32_t> inputs;
  std::vector<std::uint32_t> outputs;
};

GameVars side_vars(const SymbolicDfa& g, const Partition& p) {
  GameVars out;
  for (std::size_t i = 0; i < g.prop_names.size(); ++i) {
    const std::string& name = g.prop_names[i];
    if (p.is_input(name)) {
      out.inputs.push_back(g.prop_vars[i]);
    } else if (p.is_output(name)) {
      out.outputs.push_back(g.prop_vars[i]);
    } else {
      throw std::invalid_argument(
          "proposition not covered by the partition: " + name);
    }
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> unprimed_to_primed(
    const SymbolicDfa& g) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> map;
  map.reserve(g.state_vars.size());
  for (std::size_t i = 0; i < g.state_vars.size(); ++i) {
    map.emplace_back(g.state_vars[i], g.primed_vars[i]);
  }
  return map;
}

// Cofactors f by a partial assignment, one variable at a time.
BddRef restrict_assignment(
    BddManager& m, BddRef f,
    const std::vector<std::pair<std::uint32_t, bool>>& assignment) {
  for (const auto& [v, value] : assignment) {
    f = m.restrict_var(f, v, value);
  }
  return f;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

GameResult winning_set(const SymbolicDfa& g, const Partition& p) {
  BddManager& m = *g.mgr;
  const GameVars sides = side_vars(g, p);
  const auto to_primed = unprimed_to_primed(g);
  const BddRef primed_cube = m.cube(g.primed_vars);

  GameResult result;
  BddRef w = g.accepting;
  result.layers.push_back(w);
  for (;;) {
    ++result.iterations;
    BddRef w_primed = m.rename(w, to_primed);
    BddRef pre = m.and_exists(g.trans, w_primed, primed_cube);
    pre = m.exists(pre, sides.outputs);
    pre = m.forall(pre, sides.inputs);
    BddRef grown = m.disj(w, pre);
    result.iteration_nodes.push_back(m.node_count(grown));
    if (grown == w) break;
    w = std::move(grown);
    result.layers.push_back(w);
  }
  result.winning = w;
  result.realizable = m.implies(g.init, w).is_one();
  return result;
}

Strategy extract_strategy(const SymbolicDfa& g, const GameResult& r,
                          const Partition& p) {
  if (!r.realizable) {
    throw std::logic_error("strategy extraction on an unrealizable game");
  }
  BddManager& m = *g.mgr;
  const auto to_primed = unprimed_to_primed(g);
  const BddRef primed_cube = m.cube(g.primed_vars);

  Strategy s;
  s.dfa_ = &g;
  s.inputs_ = p.inputs;
  s.outputs_ = p.outputs;
  auto var_of = [&](const std::string& name) -> std::int64_t {
    for (std::size_t i = 0; i < g.prop_names.size(); ++i) {
      if (g.prop_names[i] == name) return g.prop_vars[i];
    }
    return -1;
  };
  for (const auto& name : s.inputs_) s.input_vars_.push_back(var_of(name));
  for (const auto& name : s.outputs_) {
    std::int64_t v = var_of(name);
    s.output_vars_.push_back(v);
    if (v >= 0) s.known_output_vars_.push_back(static_cast<std::uint32_t>(v));
  }

  s.layers_ = r.layers;
  for (std::size_t rank = 1; rank < r.layers.size(); ++rank) {
    BddRef lower_primed = m.rename(r.layers[rank - 1], to_primed);
    BddRef step = m.and_exists(g.trans, lower_primed, primed_cube);
    BddRef frontier =
        m.conj(r.layers[rank], m.negate(r.layers[rank - 1]));
    s.rules_.push_back(m.conj(frontier, step));
  }
  BddRef winning_primed = m.rename(r.winning, to_primed);
  s.inside_winning_ = m.and_exists(g.trans, winning_primed, primed_cube);
  s.any_row_ = m.exists(g.trans, primed_cube);
  return s;
}

std::vector<bool> Strategy::choose(const std::vector<bool>& state_bits,
                                   const Letter& inputs) const {
  const SymbolicDfa& g = *dfa_;
  BddManager& m = *g.mgr;
  if (state_bits.size() != g.state_vars.size()) {
    throw std::invalid_argument("state width mismatch in Strategy::choose");
  }
  for (const auto& atom : inputs) {
    if (std::find(inputs_.begin(), inputs_.end(), atom) == inputs_.end()) {
      throw std::invalid_argument("unknown input proposition: " + atom);
    }
  }

  std::vector<std::pair<std::uint32_t, bool>> fixed;
  for (std::size_t i = 0; i < g.state_vars.size(); ++i) {
    fixed.emplace_back(g.state_vars[i], state_bits[i]);
  }
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    if (input_vars_[i] >= 0) {
      fixed.emplace_back(static_cast<std::uint32_t>(input_vars_[i]),
                         inputs.count(inputs_[i]) > 0);
    }
  }

  // Rank of the current state: index of the first layer containing it.
  std::vector<bool> values(m.num_vars(), false);
  for (std::size_t i = 0; i < g.state_vars.size(); ++i) {
    values[g.state_vars[i]] = state_bits[i];
  }
  std::size_t rank = layers_.size();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (m.eval(layers_[l], values)) {
      rank = l;
      break;
    }
  }

  std::optional<std::vector<bool>> sat;
  if (rank >= 1 && rank < layers_.size()) {
    BddRef rule = restrict_assignment(m, rules_[rank - 1], fixed);
    sat = m.any_sat(rule, known_output_vars_);
    if (!sat) {
      throw std::logic_error(
          "winning state has no distance-decreasing output");
    }
  } else {
    // Already accepting, or off the winning set: prefer staying winning,
    // otherwise follow any defined row.
    BddRef inside = restrict_assignment(m, inside_winning_, fixed);
    sat = m.any_sat(inside, known_output_vars_);
    if (!sat) {
      BddRef row = restrict_assignment(m, any_row_, fixed);
      sat = m.any_sat(row, known_output_vars_);
    }
    if (!sat) sat = std::vector<bool>(known_output_vars_.size(), false);
  }

  std::vector<bool> chosen(outputs_.size(), false);
  std::size_t known = 0;
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    if (output_vars_[i] >= 0) chosen[i] = (*sat)[known++];
  }
  return chosen;
}

SimulationResult simulate(const Strategy& s,
                          const std::vector<Letter>& env_inputs) {
  const SymbolicDfa& g = s.automaton();
  BddManager& m = *g.mgr;

  SimulationResult out;
  std::vector<bool> state(g.state_vars.size(), false);

  auto note_acceptance = [&](std::size_t prefix_len) {
    if (out.accepted_at) return;
    std::vector<bool> values(m.num_vars(), false);
    for (std::size_t i = 0; i < state.size(); ++i) {
      values[g.state_vars[i]] = state[i];
    }
    if (m.eval(g.accepting, values)) out.accepted_at = prefix_len;
  };
  note_acceptance(0);

  for (const Letter& given : env_inputs) {
    std::vector<bool> outs = s.choose(state, given);

    Letter letter = given;
    for (std::size_t i = 0; i < s.output_names().size(); ++i) {
      if (outs[i]) letter.insert(s.output_names()[i]);
    }
    out.trace.push_back(letter);

    std::vector<std::pair<std::uint32_t, bool>> fixed;
    for (std::size_t i = 0; i < g.state_vars.size(); ++i) {
      fixed.emplace_back(g.state_vars[i], state[i]);
    }
    for (std::size_t i = 0; i < g.prop_names.size(); ++i) {
      fixed.emplace_back(g.prop_vars[i], letter.count(g.prop_names[i]) > 0);
    }
    BddRef row = restrict_assignment(m, g.trans, fixed);
    auto successor = m.any_sat(row, g.primed_vars);
    if (!successor) {
      throw std::logic_error("transition relation lost totality in simulate");
    }
    state = *successor;
    note_acceptance(out.trace.size());
  }

  out.accepted = out.accepted_at.has_value();
  return out;
}

SynthesisRun is_realizable(Formula f, const Partition& p, Thresholds t,
                           ComposeMode mode, const ComposeOptions& options,
                           std::uint64_t node_budget) {
  p.validate();
  for (const auto& atom : propositions(f)) {
    if (!p.is_input(atom) && !p.is_output(atom)) {
      throw std::invalid_argument(
          "proposition not covered by the partition: " + atom);
    }
  }

  SynthesisRun run;
  run.mgr = std::make_unique<BddManager>(node_budget);
  run.vars = std::make_unique<VarTable>(*run.mgr);
  for (const auto& name : p.inputs) run.vars->prop_var(name);
  for (const auto& name : p.outputs) run.vars->prop_var(name);

  auto dfa_start = std::chrono::steady_clock::now();
  run.composition = compose(f, *run.vars, t, mode, options);
  run.dfa_ms = elapsed_ms(dfa_start);

  auto game_start = std::chrono::steady_clock::now();
  run.game = winning_set(run.composition.dfa, p);
  run.fixpoint_ms = elapsed_ms(game_start);
  return run;
}

}  // namespace lisaforge
