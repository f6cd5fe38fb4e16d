// Python bindings: a thin, string-oriented face over the core library.
// Formulas travel as text, traces as lists of lists of atom names, so no
// arena or manager lifetimes ever cross the language boundary except inside
// the Synthesis holder, which owns everything it needs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lisaforge/bench.hpp"
#include "lisaforge/composer.hpp"
#include "lisaforge/errors.hpp"
#include "lisaforge/explicit_dfa.hpp"
#include "lisaforge/ltlf.hpp"
#include "lisaforge/symbolic_dfa.hpp"
#include "lisaforge/synthesis.hpp"

namespace py = pybind11;

namespace {

using namespace lisaforge;

using PyTrace = std::vector<std::vector<std::string>>;

Trace trace_from(const PyTrace& letters) {
  Trace t;
  t.reserve(letters.size());
  for (const auto& atoms : letters) t.emplace_back(atoms.begin(), atoms.end());
  return t;
}

PyTrace trace_to(const Trace& t) {
  PyTrace out;
  out.reserve(t.size());
  for (const Letter& l : t) out.emplace_back(l.begin(), l.end());
  return out;
}

ComposeMode mode_from(const std::string& name) {
  if (name == "hybrid") return ComposeMode::Hybrid;
  if (name == "explicit") return ComposeMode::Explicit;
  if (name == "symbolic") return ComposeMode::Symbolic;
  throw std::invalid_argument("unknown mode: " + name);
}

bool py_evaluate(const std::string& formula, const PyTrace& trace) {
  FormulaArena arena;
  return evaluate(trace_from(trace), parse(formula, arena));
}

bool py_accepts(const std::string& formula, const PyTrace& trace) {
  FormulaArena arena;
  return accepts(from_ltlf(parse(formula, arena)), trace_from(trace));
}

std::string py_canonical(const std::string& formula) {
  FormulaArena arena;
  return to_string(parse(formula, arena));
}

std::vector<std::string> py_propositions(const std::string& formula) {
  FormulaArena arena;
  auto props = propositions(parse(formula, arena));
  return {props.begin(), props.end()};
}

std::size_t py_min_dfa_states(const std::string& formula) {
  FormulaArena arena;
  return from_ltlf(parse(formula, arena)).num_states();
}

std::string py_dfa_dot(const std::string& formula) {
  FormulaArena arena;
  std::ostringstream os;
  to_dot(from_ltlf(parse(formula, arena)), os);
  return os.str();
}

py::dict py_convert(const std::string& formula, const std::string& mode,
                    std::uint64_t t1, std::uint64_t t2,
                    std::uint64_t node_budget) {
  FormulaArena arena;
  Formula f = parse(formula, arena);
  BddManager mgr(node_budget);
  VarTable vars(mgr);
  ComposeResult res = compose(f, vars, Thresholds{t1, t2}, mode_from(mode));
  py::dict d;
  d["mode"] = std::string(to_string(res.log.mode));
  d["t1"] = res.log.thresholds.t1;
  d["t2"] = res.log.thresholds.t2;
  d["conjuncts"] = res.log.seed_sizes.size();
  d["explicit_products"] = res.log.explicit_products;
  d["symbolic_products"] = res.log.symbolic_products;
  d["state_vars"] = res.dfa.num_state_vars();
  d["switched"] = res.log.switched;
  if (res.explicit_final) {
    d["min_dfa_states"] = res.explicit_final->num_states();
  } else {
    d["min_dfa_states"] = py::none();
  }
  return d;
}

py::dict instance_to_dict(const BenchmarkInstance& inst) {
  py::dict d;
  d["name"] = inst.name;
  d["family"] = inst.family;
  d["formula"] = to_string(inst.formula);
  d["inputs"] = inst.partition.inputs;
  d["outputs"] = inst.partition.outputs;
  d["ltlf_text"] = ltlf_file_text(inst);
  d["part_text"] = part_file_text(inst.partition);
  return d;
}

py::dict py_generate(const std::string& family, std::size_t n,
                     std::size_t heaps, std::size_t tokens, std::size_t depth,
                     std::size_t props, std::uint64_t seed) {
  FormulaArena arena;
  if (family == "counter") return instance_to_dict(gen_counter(n, arena));
  if (family == "counter-inc") {
    return instance_to_dict(gen_counter(n, arena, /*with_inc=*/true));
  }
  if (family == "double") {
    return instance_to_dict(gen_double_counter(n, arena));
  }
  if (family == "nim") return instance_to_dict(gen_nim(heaps, tokens, arena));
  if (family == "random") {
    return instance_to_dict(gen_random(depth, props, seed, arena));
  }
  throw std::invalid_argument("unknown family: " + family);
}

/// End-to-end realizability run.  Owns the arena, the manager and the
/// extracted controller, so simulate() stays valid for the object's lifetime.
class Synthesis {
 public:
  Synthesis(const std::string& formula, std::vector<std::string> inputs,
            std::vector<std::string> outputs, const std::string& mode,
            std::uint64_t t1, std::uint64_t t2, std::uint64_t node_budget)
      : part_{std::move(inputs), std::move(outputs)} {
    Formula f = parse(formula, arena_);
    run_ = is_realizable(f, part_, Thresholds{t1, t2}, mode_from(mode), {},
                         node_budget);
    if (run_.game.realizable) {
      strategy_.emplace(
          extract_strategy(run_.composition.dfa, run_.game, part_));
    }
  }

  bool realizable() const { return run_.game.realizable; }
  std::size_t iterations() const { return run_.game.iterations; }
  std::size_t state_vars() const {
    return run_.composition.dfa.num_state_vars();
  }
  double dfa_ms() const { return run_.dfa_ms; }
  double fixpoint_ms() const { return run_.fixpoint_ms; }

  py::dict simulate(const PyTrace& env_inputs) const {
    if (!strategy_) {
      throw std::logic_error("simulate() needs a realizable objective");
    }
    SimulationResult r =
        lisaforge::simulate(*strategy_, trace_from(env_inputs));
    py::dict d;
    d["trace"] = trace_to(r.trace);
    d["accepted"] = r.accepted;
    if (r.accepted_at) {
      d["accepted_at"] = *r.accepted_at;
    } else {
      d["accepted_at"] = py::none();
    }
    return d;
  }

 private:
  FormulaArena arena_;
  Partition part_;
  SynthesisRun run_;
  std::optional<Strategy> strategy_;
};

}  // namespace

PYBIND11_MODULE(_lisaforge, m) {
  m.doc() = "LTLf-to-DFA conversion and reactive synthesis";

  py::register_exception<ParseError>(m, "FormulaParseError");
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded");

  m.def("evaluate", &py_evaluate, py::arg("formula"), py::arg("trace"),
        "Truth of an LTLf formula on a nonempty trace "
        "(a list of lists of atom names).");
  m.def("accepts", &py_accepts, py::arg("formula"), py::arg("trace"),
        "Membership decided by the compiled automaton; agrees with "
        "evaluate() on every nonempty trace.");
  m.def("canonical", &py_canonical, py::arg("formula"),
        "Parse and print back with minimal parentheses.");
  m.def("propositions", &py_propositions, py::arg("formula"),
        "Sorted atom names of a formula.");
  m.def("min_dfa_states", &py_min_dfa_states, py::arg("formula"),
        "Number of states of the minimal deterministic automaton.");
  m.def("dfa_dot", &py_dfa_dot, py::arg("formula"),
        "Graphviz rendering of the minimal deterministic automaton.");
  m.def("convert", &py_convert, py::arg("formula"), py::arg("mode") = "hybrid",
        py::arg("t1") = Thresholds{}.t1, py::arg("t2") = Thresholds{}.t2,
        py::arg("node_budget") = BddManager::kDefaultNodeBudget,
        "Compose a formula into a symbolic automaton; returns run "
        "statistics.");
  m.def("generate", &py_generate, py::arg("family"), py::arg("n") = 1,
        py::arg("heaps") = 1, py::arg("tokens") = 1, py::arg("depth") = 3,
        py::arg("props") = 3, py::arg("seed") = 1,
        "Benchmark instance of a family: counter, counter-inc, double, "
        "nim or random.");

  py::class_<Synthesis>(m, "Synthesis",
                        "Realizability check plus extracted controller.")
      .def(py::init<const std::string&, std::vector<std::string>,
                    std::vector<std::string>, const std::string&,
                    std::uint64_t, std::uint64_t, std::uint64_t>(),
           py::arg("formula"), py::arg("inputs"), py::arg("outputs"),
           py::arg("mode") = "hybrid", py::arg("t1") = Thresholds{}.t1,
           py::arg("t2") = Thresholds{}.t2,
           py::arg("node_budget") = BddManager::kDefaultNodeBudget)
      .def_property_readonly("realizable", &Synthesis::realizable)
      .def_property_readonly("iterations", &Synthesis::iterations)
      .def_property_readonly("state_vars", &Synthesis::state_vars)
      .def_property_readonly("dfa_ms", &Synthesis::dfa_ms)
      .def_property_readonly("fixpoint_ms", &Synthesis::fixpoint_ms)
      .def("simulate", &Synthesis::simulate, py::arg("env_inputs"),
           "Play the controller against a scripted environment; returns "
           "the combined trace and where it first accepted.");
}
