#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lisaforge/bench.hpp"
#include "lisaforge/errors.hpp"
#include "lisaforge/explicit_dfa.hpp"
#include "lisaforge/ltlf.hpp"
#include "lisaforge/synthesis.hpp"
#include "support.hpp"

using namespace lisaforge;
namespace ts = lisaforge::testsupport;

namespace {

Partition io(std::vector<std::string> in, std::vector<std::string> out) {
  Partition p;
  p.inputs = std::move(in);
  p.outputs = std::move(out);
  return p;
}

}  // namespace

TEST_CASE("a goal the controller owns is realizable") {
  FormulaArena a;
  SynthesisRun run = is_realizable(parse("F o", a), io({"i"}, {"o"}));
  CHECK(run.game.realizable);
  // One growing application (the initial state joins), one confirming one.
  CHECK(run.game.iterations == 2);
  CHECK(run.game.layers.size() == 2);
  CHECK(run.game.winning == run.game.layers.back());
  CHECK(run.game.iteration_nodes.size() == run.game.iterations);
}

TEST_CASE("a goal the environment owns is unrealizable") {
  FormulaArena a;
  SynthesisRun run = is_realizable(parse("F i", a), io({"i"}, {"o"}));
  CHECK_FALSE(run.game.realizable);
  // The environment can hold i low forever: nothing joins the accepting set.
  CHECK(run.game.iterations == 1);
  CHECK_THROWS_AS(extract_strategy(run.composition.dfa, run.game,
                                   io({"i"}, {"o"})),
                  std::logic_error);
}

TEST_CASE("layers grow monotonically up to the winning set") {
  FormulaArena a;
  BenchmarkInstance inst = gen_counter(2, a);
  SynthesisRun run = is_realizable(inst.formula, inst.partition);
  REQUIRE(run.game.realizable);
  const auto& layers = run.game.layers;
  REQUIRE(layers.size() >= 2);
  BddManager& m = *run.mgr;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    // W_i implies W_{i+1} and the inclusion is strict.
    CHECK(m.implies(layers[i], layers[i + 1]) == m.one());
    CHECK(layers[i] != layers[i + 1]);
  }
  CHECK(layers.back() == run.game.winning);
}

TEST_CASE("counter games need one fixpoint round per trace position") {
  FormulaArena a;
  for (auto [n, expected] : {std::pair<std::size_t, std::size_t>{1, 3},
                             {2, 5},
                             {3, 9}}) {
    BenchmarkInstance inst = gen_counter(n, a);
    SynthesisRun run = is_realizable(inst.formula, inst.partition);
    CHECK(run.game.realizable);
    CHECK(run.game.iterations == expected);
  }
}

TEST_CASE("the pursuit family is realizable with a deep fixpoint") {
  FormulaArena a;
  BenchmarkInstance inst = gen_double_counter(2, a);
  SynthesisRun run = is_realizable(inst.formula, inst.partition);
  CHECK(run.game.realizable);
  CHECK(run.game.iterations == 5);
}

TEST_CASE("the verdict does not depend on the composition mode") {
  for (ComposeMode mode :
       {ComposeMode::Hybrid, ComposeMode::Explicit, ComposeMode::Symbolic}) {
    FormulaArena a;
    BenchmarkInstance inst = gen_counter(2, a);
    SynthesisRun run = is_realizable(inst.formula, inst.partition,
                                     Thresholds{}, mode);
    CHECK(run.game.realizable);
    CHECK(run.game.iterations == 5);
  }
  for (ComposeMode mode :
       {ComposeMode::Hybrid, ComposeMode::Explicit, ComposeMode::Symbolic}) {
    FormulaArena a;
    SynthesisRun run =
        is_realizable(parse("F i & F o", a), io({"i"}, {"o"}), Thresholds{},
                      mode);
    CHECK_FALSE(run.game.realizable);
  }
}

TEST_CASE("backward induction agrees with the fixpoint") {
  struct Probe {
    std::string text;
    bool realizable;
  };
  for (const Probe& probe :
       {Probe{"F o", true}, Probe{"F i", false}, Probe{"G o", true},
        Probe{"G(i -> o)", true}, Probe{"F(i & o)", false},
        Probe{"o U i", false}, Probe{"i U o", true},
        Probe{"G(o <-> X o) & F o", false}}) {
    FormulaArena a;
    Formula f = parse(probe.text, a);
    Partition p = io({"i"}, {"o"});
    SynthesisRun run = is_realizable(f, p);
    CHECK_MESSAGE(run.game.realizable == probe.realizable, probe.text);
    ts::GameOracle oracle = ts::solve_by_backward_induction(from_ltlf(f), p);
    CHECK_MESSAGE(oracle.realizable == probe.realizable, probe.text);
  }
}

TEST_CASE("backward induction agrees on the benchmark families") {
  {
    FormulaArena a;
    BenchmarkInstance inst = gen_counter(1, a);
    ts::GameOracle oracle =
        ts::solve_by_backward_induction(from_ltlf(inst.formula),
                                        inst.partition);
    CHECK(oracle.realizable ==
          is_realizable(inst.formula, inst.partition).game.realizable);
  }
  {
    FormulaArena a;
    BenchmarkInstance inst = gen_nim(2, 1, a);
    ts::GameOracle oracle =
        ts::solve_by_backward_induction(from_ltlf(inst.formula),
                                        inst.partition);
    bool fixpoint = is_realizable(inst.formula, inst.partition).game.realizable;
    CHECK(oracle.realizable == fixpoint);
    CHECK(fixpoint);  // two equal heaps: answering moves win
  }
}

TEST_CASE("the controller picks least outputs and simulate replays them") {
  FormulaArena a;
  Partition p = io({"i"}, {"o"});
  SynthesisRun run = is_realizable(parse("F o", a), p);
  REQUIRE(run.game.realizable);
  Strategy s = extract_strategy(run.composition.dfa, run.game, p);
  CHECK(s.input_names() == std::vector<std::string>{"i"});
  CHECK(s.output_names() == std::vector<std::string>{"o"});
  // From the initial state the only way to shrink the rank is o = true.
  ts::SymbolicWalker walker(run.composition.dfa);
  std::vector<bool> outs = s.choose(walker.initial(), Letter{});
  REQUIRE(outs.size() == 1);
  CHECK(outs[0]);
  SimulationResult sim = simulate(s, {Letter{}, Letter{}});
  CHECK(sim.accepted);
  REQUIRE(sim.accepted_at.has_value());
  CHECK(*sim.accepted_at == 1);
  REQUIRE(sim.trace.size() == 2);
  CHECK(sim.trace[0].count("o") == 1);  // the chosen output is published
  CHECK_THROWS_AS(s.choose(walker.initial(), Letter{"bogus"}),
                  std::invalid_argument);
}

TEST_CASE("a vacuously satisfied objective accepts before any round") {
  FormulaArena a;
  Partition p = io({"i"}, {"o"});
  SynthesisRun run = is_realizable(parse("G(i <-> X o)", a), p);
  REQUIRE(run.game.realizable);
  Strategy s = extract_strategy(run.composition.dfa, run.game, p);
  SimulationResult sim = simulate(s, {Letter{"i"}});
  CHECK(sim.accepted);
  REQUIRE(sim.accepted_at.has_value());
  CHECK(*sim.accepted_at == 0);
}

TEST_CASE("no environment play beats an extracted controller") {
  FormulaArena a;
  BenchmarkInstance inst = gen_counter(2, a);
  SynthesisRun run = is_realizable(inst.formula, inst.partition);
  REQUIRE(run.game.realizable);
  Strategy s =
      extract_strategy(run.composition.dfa, run.game, inst.partition);
  std::size_t horizon = from_ltlf(inst.formula).num_states();
  auto failure = ts::strategy_counterexample(s, horizon);
  CHECK_MESSAGE(!failure.has_value(), failure.value_or(""));
}

TEST_CASE("a partition must cover every proposition") {
  FormulaArena a;
  CHECK_THROWS_AS(is_realizable(parse("F o & F q", a), io({"i"}, {"o"})),
                  std::invalid_argument);
  CHECK_THROWS_AS(is_realizable(parse("F o", a), io({"o"}, {"o"})),
                  std::invalid_argument);
}

TEST_CASE("a starving node budget raises the resource error") {
  FormulaArena a;
  BenchmarkInstance inst = gen_counter(3, a);
  CHECK_THROWS_AS(is_realizable(inst.formula, inst.partition, Thresholds{},
                                ComposeMode::Hybrid, ComposeOptions{}, 64),
                  BudgetExceeded);
  try {
    is_realizable(inst.formula, inst.partition, Thresholds{},
                  ComposeMode::Hybrid, ComposeOptions{}, 64);
  } catch (const BudgetExceeded& e) {
    CHECK(e.kind() == BudgetExceeded::Kind::BddNodes);
    CHECK(e.limit() == 64);
  }
}
