// lisaforge command line driver.
//
// Subcommands:
//   convert   LTLf formula -> symbolic DFA (optionally rendered / logged)
//   synth     realizability + optional strategy simulation
//   gen       emit benchmark instance files (.ltlf / .part)
//   selftest  quick oracle suites, suitable for a smoke check
//   batch     run a job list, forking one process (one manager) per job
//
// Exit codes: 0 success (convert/gen/selftest/batch), 10 REALIZABLE,
// 20 UNREALIZABLE, 1 error, 2 resource budget exceeded.

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lisaforge/bench.hpp"
#include "lisaforge/composer.hpp"
#include "lisaforge/errors.hpp"
#include "lisaforge/explicit_dfa.hpp"
#include "lisaforge/ltlf.hpp"
#include "lisaforge/symbolic_dfa.hpp"
#include "lisaforge/synthesis.hpp"

namespace {

using namespace lisaforge;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBudget = 2;
constexpr int kExitRealizable = 10;
constexpr int kExitUnrealizable = 20;

ComposeMode parse_mode(const std::string& name) {
  if (name == "hybrid") return ComposeMode::Hybrid;
  if (name == "explicit") return ComposeMode::Explicit;
  if (name == "symbolic") return ComposeMode::Symbolic;
  throw std::invalid_argument("unknown mode: " + name);
}

/// Flags shared by convert and synth.
struct CommonFlags {
  std::string ltlf_path;
  std::string mode = "hybrid";
  std::uint64_t t1 = Thresholds{}.t1;
  std::uint64_t t2 = Thresholds{}.t2;
  std::uint64_t node_budget = BddManager::kDefaultNodeBudget;
  std::string dot_path;
  std::string stats_path;
  std::string trace_path;

  Thresholds thresholds() const { return Thresholds{t1, t2}; }
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--ltlf", f.ltlf_path, "Formula file (.ltlf)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--mode", f.mode, "Composition mode")
      ->check(CLI::IsMember({"hybrid", "explicit", "symbolic"}))
      ->capture_default_str();
  cmd->add_option("--t1", f.t1, "Per-automaton switch threshold")
      ->capture_default_str();
  cmd->add_option("--t2", f.t2, "Pairwise-product switch threshold")
      ->capture_default_str();
  cmd->add_option("--node-budget", f.node_budget,
                  "Decision-diagram node cap (exit 2 when exceeded)")
      ->capture_default_str();
  cmd->add_option("--dot", f.dot_path, "Write the DFA in Graphviz format");
  cmd->add_option("--stats", f.stats_path, "Write run statistics as JSON");
  cmd->add_option("--trace", f.trace_path,
                  "Write the composition event log as JSON lines");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << text;
  if (!os.good()) throw std::runtime_error("write failed: " + path);
}

void maybe_write_dot(const std::string& path, const ComposeResult& res) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  if (res.explicit_final) {
    to_dot(*res.explicit_final, os);
  } else {
    to_dot(to_explicit(res.dfa), os);
  }
}

void maybe_write_trace(const std::string& path, const ComposeResult& res) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  res.log.write_jsonl(os, res.dfa);
}

json base_stats(const ComposeResult& res) {
  json j;
  j["mode"] = to_string(res.log.mode);
  j["t1"] = res.log.thresholds.t1;
  j["t2"] = res.log.thresholds.t2;
  j["conjuncts"] = res.log.seed_sizes.size();
  j["explicit_products"] = res.log.explicit_products;
  j["symbolic_products"] = res.log.symbolic_products;
  j["state_vars"] = res.dfa.num_state_vars();
  if (res.explicit_final) {
    j["min_dfa_states"] = res.explicit_final->num_states();
  }
  return j;
}

int run_convert(const CommonFlags& a) {
  FormulaArena arena;
  Formula f = read_formula_file(a.ltlf_path, arena);

  BddManager mgr(a.node_budget);
  VarTable vars(mgr);
  auto start = std::chrono::steady_clock::now();
  ComposeResult res = compose(f, vars, a.thresholds(), parse_mode(a.mode));
  double dfa_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();

  std::cout << "converted: mode=" << to_string(res.log.mode)
            << " conjuncts=" << res.log.seed_sizes.size()
            << " state_vars=" << res.dfa.num_state_vars()
            << " switched=" << (res.log.switched ? "yes" : "no");
  if (res.explicit_final) {
    std::cout << " min_states=" << res.explicit_final->num_states();
  }
  std::cout << "\n";

  maybe_write_dot(a.dot_path, res);
  maybe_write_trace(a.trace_path, res);
  if (!a.stats_path.empty()) {
    json j = base_stats(res);
    j["iterations"] = res.log.explicit_products + res.log.symbolic_products;
    j["dfa_ms"] = dfa_ms;
    j["bdd_nodes_peak"] = mgr.stats().peak_live_nodes;
    write_file(a.stats_path, j.dump(2) + "\n");
  }
  return kExitOk;
}

std::vector<Letter> read_input_script(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  json j = json::parse(is);
  if (!j.is_array()) {
    throw std::runtime_error("input script must be a JSON array of letters");
  }
  std::vector<Letter> script;
  for (const auto& letter : j) {
    if (!letter.is_array()) {
      throw std::runtime_error(
          "each letter must be a JSON array of atom names");
    }
    Letter l;
    for (const auto& atom : letter) l.insert(atom.get<std::string>());
    script.push_back(std::move(l));
  }
  return script;
}

json letter_to_json(const Letter& l) {
  json a = json::array();
  for (const auto& name : l) a.push_back(name);
  return a;
}

int run_synth(const CommonFlags& a, const std::string& part_path,
              const std::string& simulate_path) {
  FormulaArena arena;
  Formula f = read_formula_file(a.ltlf_path, arena);
  Partition part = read_partition_file(part_path);

  SynthesisRun run = is_realizable(f, part, a.thresholds(),
                                   parse_mode(a.mode), {}, a.node_budget);
  const bool realizable = run.game.realizable;
  std::cout << (realizable ? "REALIZABLE" : "UNREALIZABLE") << "\n";

  maybe_write_dot(a.dot_path, run.composition);
  maybe_write_trace(a.trace_path, run.composition);
  if (!a.stats_path.empty()) {
    json j = base_stats(run.composition);
    j["iterations"] = run.game.iterations;
    j["dfa_ms"] = run.dfa_ms;
    j["fixpoint_ms"] = run.fixpoint_ms;
    j["bdd_nodes_peak"] = run.mgr->stats().peak_live_nodes;
    j["winning_set_nodes"] = run.mgr->node_count(run.game.winning);
    j["realizable"] = realizable;
    write_file(a.stats_path, j.dump(2) + "\n");
  }

  if (!simulate_path.empty()) {
    if (!realizable) {
      std::cerr << "error: --simulate needs a realizable objective\n";
      return kExitError;
    }
    Strategy strat = extract_strategy(run.composition.dfa, run.game, part);
    SimulationResult sim = simulate(strat, read_input_script(simulate_path));
    json out;
    out["trace"] = json::array();
    for (const auto& letter : sim.trace) {
      out["trace"].push_back(letter_to_json(letter));
    }
    out["accepted"] = sim.accepted;
    if (sim.accepted_at) {
      out["accepted_at"] = *sim.accepted_at;
    } else {
      out["accepted_at"] = nullptr;
    }
    std::cout << out.dump() << "\n";
  }
  return realizable ? kExitRealizable : kExitUnrealizable;
}

struct GenFlags {
  std::string family;
  std::string out_dir = ".";
  std::size_t n = 1;
  std::size_t heaps = 1;
  std::size_t tokens = 1;
  std::size_t depth = 3;
  std::size_t props = 3;
  std::uint64_t seed = 1;
};

int run_gen(const GenFlags& g) {
  FormulaArena arena;
  BenchmarkInstance inst;
  if (g.family == "counter") {
    inst = gen_counter(g.n, arena);
  } else if (g.family == "counter-inc") {
    inst = gen_counter(g.n, arena, /*with_inc=*/true);
  } else if (g.family == "double") {
    inst = gen_double_counter(g.n, arena);
  } else if (g.family == "nim") {
    inst = gen_nim(g.heaps, g.tokens, arena);
  } else if (g.family == "random") {
    inst = gen_random(g.depth, g.props, g.seed, arena);
  } else {
    throw std::invalid_argument("unknown family: " + g.family);
  }

  std::filesystem::create_directories(g.out_dir);
  const std::string stem = g.out_dir + "/" + inst.name;
  write_file(stem + ".ltlf", ltlf_file_text(inst));
  write_file(stem + ".part", part_file_text(inst.partition));
  std::cout << "wrote " << stem << ".ltlf\n";
  std::cout << "wrote " << stem << ".part\n";
  if (inst.family == "nim") {
    std::cerr << "note: nim games drive the diagrams hard; synthesize with "
                 "--t2 300000\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

/// Every trace over `props` of length 1..max_len, letters in mask order.
std::vector<Trace> all_traces(const std::vector<std::string>& props,
                              std::size_t max_len) {
  const std::size_t letters = std::size_t{1} << props.size();
  std::vector<Trace> out;
  std::vector<Trace> frontier = {Trace{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Trace> next;
    for (const Trace& t : frontier) {
      for (std::size_t m = 0; m < letters; ++m) {
        Trace extended = t;
        Letter l;
        for (std::size_t i = 0; i < props.size(); ++i) {
          if (m >> i & 1) l.insert(props[i]);
        }
        extended.push_back(std::move(l));
        out.push_back(extended);
        next.push_back(std::move(extended));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

int run_selftest() {
  int failures = 0;
  auto check = [&](const std::string& name, auto&& body) {
    try {
      body();
      std::cout << "ok   " << name << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL " << name << ": " << e.what() << "\n";
    }
  };
  auto expect = [](bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error(what);
  };

  check("parse-print roundtrip", [&] {
    FormulaArena arena;
    for (const char* text :
         {"a U b & G c", "F(a & X b)", "!X!a", "G(a -> X b)", "a <-> b"}) {
      Formula f = parse(text, arena);
      expect(parse(to_string(f), arena) == f, std::string("roundtrip: ") + text);
    }
  });

  check("progression matches trace semantics", [&] {
    FormulaArena arena;
    const std::vector<std::string> props = {"a", "b"};
    auto traces = all_traces(props, 4);
    for (const char* text :
         {"a", "!a", "X a", "!X!a", "X G a", "F a", "G a", "a U b",
          "F(a & X b)", "G(a -> X b)", "X !a", "!(a U b)"}) {
      Formula f = parse(text, arena);
      ExplicitDfa d = from_ltlf(f);
      for (const Trace& w : traces) {
        expect(accepts(d, w) == evaluate(w, f),
               std::string("disagreement on ") + text);
      }
    }
  });

  check("decision-diagram algebra", [&] {
    BddManager m(1u << 20);
    std::uint32_t x = m.new_var("x"), y = m.new_var("y"), z = m.new_var("z");
    BddRef fx = m.var(x), fy = m.var(y), fz = m.var(z);
    BddRef f = (fx & fy) | (!fx & fz);
    expect(((fx & fy) | (fy & fx)).id() == (fx & fy).id(), "canonicity");
    BddRef shannon = (fx & m.restrict_var(f, x, true)) |
                     (!fx & m.restrict_var(f, x, false));
    expect(shannon.id() == f.id(), "Shannon expansion");
    expect(m.exists(f, {y}).id() == (!m.forall(!f, {y})).id(),
           "quantifier duality");
  });

  check("counter games", [&] {
    FormulaArena arena;
    auto c1 = gen_counter(1, arena);
    SynthesisRun r1 = is_realizable(c1.formula, c1.partition);
    expect(r1.game.realizable, "counter n=1 realizable");
    expect(r1.game.iterations == 3, "counter n=1 fixpoint depth");
    auto c2 = gen_counter(2, arena);
    SynthesisRun r2 = is_realizable(c2.formula, c2.partition);
    expect(r2.game.realizable, "counter n=2 realizable");
    expect(r2.game.iterations == 5, "counter n=2 fixpoint depth");
  });

  check("nim verdicts", [&] {
    FormulaArena arena;
    auto n11 = gen_nim(1, 1, arena);
    expect(!is_realizable(n11.formula, n11.partition).game.realizable,
           "nim 1x1 unrealizable");
    auto n21 = gen_nim(2, 1, arena);
    expect(is_realizable(n21.formula, n21.partition).game.realizable,
           "nim 2x1 realizable");
  });

  check("modes agree", [&] {
    FormulaArena arena;
    Formula f = parse("a U b", arena);
    Partition p{{"a"}, {"b"}};
    bool verdict[3];
    int i = 0;
    for (ComposeMode mode : {ComposeMode::Hybrid, ComposeMode::Explicit,
                             ComposeMode::Symbolic}) {
      verdict[i++] = is_realizable(f, p, Thresholds{}, mode).game.realizable;
    }
    expect(verdict[0] == verdict[1] && verdict[1] == verdict[2],
           "verdicts differ across modes");
  });

  std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
  return failures == 0 ? kExitOk : kExitError;
}

// ---------------------------------------------------------------------------
// batch
// ---------------------------------------------------------------------------

struct BatchJob {
  std::string name;
  std::string ltlf;
  std::string part;  // empty -> convert instead of synth
};

std::vector<BatchJob> read_job_list(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::vector<BatchJob> jobs;
  std::string line;
  while (std::getline(is, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    BatchJob job;
    if (!(fields >> job.name >> job.ltlf)) continue;  // blank or comment
    fields >> job.part;
    jobs.push_back(std::move(job));
  }
  return jobs;
}

const char* verdict_of_exit(int code) {
  switch (code) {
    case kExitOk: return "ok";
    case kExitRealizable: return "REALIZABLE";
    case kExitUnrealizable: return "UNREALIZABLE";
    case kExitBudget: return "budget-exceeded";
    default: return "error";
  }
}

int run_one_guarded(const CommonFlags& flags, const std::string& part_path);

int run_batch(const std::string& list_path, unsigned jobs_limit,
              const std::string& out_dir, const CommonFlags& base) {
  std::vector<BatchJob> jobs = read_job_list(list_path);
  if (jobs.empty()) {
    std::cerr << "error: no jobs in " << list_path << "\n";
    return kExitError;
  }
  std::filesystem::create_directories(out_dir);

  std::map<pid_t, std::size_t> running;  // pid -> job index
  std::vector<int> exit_codes(jobs.size(), -1);

  auto reap_one = [&] {
    int status = 0;
    pid_t pid = waitpid(-1, &status, 0);
    if (pid < 0) throw std::runtime_error("waitpid failed");
    auto it = running.find(pid);
    if (it == running.end()) return;
    exit_codes[it->second] =
        WIFEXITED(status) ? WEXITSTATUS(status) : kExitError;
    running.erase(it);
  };

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    while (running.size() >= jobs_limit) reap_one();
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      // Child: own process, own manager.  Console output goes to a log file;
      // the verdict travels back through the exit code and the stats file.
      const std::string log_path = out_dir + "/" + jobs[i].name + ".log";
      int fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
      if (fd >= 0) {
        ::dup2(fd, STDOUT_FILENO);
        ::dup2(fd, STDERR_FILENO);
        ::close(fd);
      }
      CommonFlags flags = base;
      flags.ltlf_path = jobs[i].ltlf;
      flags.stats_path = out_dir + "/" + jobs[i].name + ".stats.json";
      ::_exit(run_one_guarded(flags, jobs[i].part));
    }
    running.emplace(pid, i);
  }
  while (!running.empty()) reap_one();

  int errors = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const int code = exit_codes[i];
    if (code != kExitOk && code != kExitRealizable &&
        code != kExitUnrealizable) {
      ++errors;
    }
    std::cout << jobs[i].name << ": " << verdict_of_exit(code) << " (exit "
              << code << ")\n";
  }
  std::cout << "batch: " << jobs.size() << " jobs, " << errors << " errors\n";
  return errors == 0 ? kExitOk : kExitError;
}

/// Runs convert (no partition) or synth with the process-wide error mapping,
/// so batch children report the same codes as top-level invocations.
int run_one_guarded(const CommonFlags& flags, const std::string& part_path) {
  try {
    if (part_path.empty()) return run_convert(flags);
    return run_synth(flags, part_path, /*simulate_path=*/"");
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LTLf-to-DFA conversion and reactive synthesis"};
  app.require_subcommand(1);

  CommonFlags convert_flags;
  CLI::App* convert = app.add_subcommand(
      "convert", "Compile an LTLf formula into a deterministic automaton");
  add_common_flags(convert, convert_flags);

  CommonFlags synth_flags;
  std::string part_path;
  std::string simulate_path;
  CLI::App* synth = app.add_subcommand(
      "synth", "Decide realizability and optionally simulate the controller");
  add_common_flags(synth, synth_flags);
  synth->add_option("--part", part_path, "Input/output partition (.part)")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--simulate", simulate_path,
                    "JSON array of input letters to play against the "
                    "extracted controller")
      ->check(CLI::ExistingFile);

  GenFlags gen_flags;
  CLI::App* gen =
      app.add_subcommand("gen", "Write benchmark instance files");
  gen->add_option("--family", gen_flags.family, "Benchmark family")
      ->required()
      ->check(CLI::IsMember(
          {"counter", "counter-inc", "double", "nim", "random"}));
  gen->add_option("--out", gen_flags.out_dir, "Output directory")
      ->capture_default_str();
  gen->add_option("-n,--bits", gen_flags.n, "Counter bit width")
      ->capture_default_str();
  gen->add_option("--heaps", gen_flags.heaps, "Nim heap count")
      ->capture_default_str();
  gen->add_option("--tokens", gen_flags.tokens, "Tokens per nim heap")
      ->capture_default_str();
  gen->add_option("--depth", gen_flags.depth, "Random formula depth")
      ->capture_default_str();
  gen->add_option("--props", gen_flags.props, "Random proposition count")
      ->capture_default_str();
  gen->add_option("--seed", gen_flags.seed, "Random generator seed")
      ->capture_default_str();

  CLI::App* selftest =
      app.add_subcommand("selftest", "Run the built-in oracle suites");

  std::string batch_list;
  std::string batch_out = "batch-out";
  unsigned batch_jobs = 1;
  CommonFlags batch_flags;
  CLI::App* batch = app.add_subcommand(
      "batch", "Run a list of jobs, one forked process each");
  batch->add_option("--list", batch_list,
                    "Job file: NAME FORMULA.ltlf [PARTITION.part] per line")
      ->required()
      ->check(CLI::ExistingFile);
  batch->add_option("--jobs", batch_jobs, "Concurrent processes")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  batch->add_option("--out", batch_out, "Directory for logs and stats")
      ->capture_default_str();
  batch->add_option("--mode", batch_flags.mode, "Composition mode")
      ->check(CLI::IsMember({"hybrid", "explicit", "symbolic"}))
      ->capture_default_str();
  batch->add_option("--t1", batch_flags.t1, "Per-automaton switch threshold")
      ->capture_default_str();
  batch->add_option("--t2", batch_flags.t2,
                    "Pairwise-product switch threshold")
      ->capture_default_str();
  batch->add_option("--node-budget", batch_flags.node_budget,
                    "Decision-diagram node cap")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (convert->parsed()) return run_convert(convert_flags);
    if (synth->parsed()) return run_synth(synth_flags, part_path, simulate_path);
    if (gen->parsed()) return run_gen(gen_flags);
    if (selftest->parsed()) return run_selftest();
    if (batch->parsed())
      return run_batch(batch_list, batch_jobs, batch_out, batch_flags);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;  // unreachable: a subcommand is required
}
