#include "lisaforge/bench.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

namespace lisaforge {

namespace {

Formula xor_of(FormulaArena& a, Formula lhs, Formula rhs) {
  return a.make_or(a.make_and(lhs, a.make_not(rhs)),
                   a.make_and(a.make_not(lhs), rhs));
}

std::vector<Formula> indexed_atoms(FormulaArena& a, const std::string& stem,
                                   std::size_t count) {
  std::vector<Formula> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(a.atom(stem + std::to_string(i)));
  }
  return out;
}

std::vector<std::string> atom_names(const std::vector<Formula>& atoms) {
  std::vector<std::string> out;
  out.reserve(atoms.size());
  for (const Formula& f : atoms) out.push_back(f.name());
  return out;
}

// Conjunction asserting the little-endian bit vector spells `value`.
Formula bits_equal(FormulaArena& a, const std::vector<Formula>& bits,
                   std::uint64_t value) {
  std::vector<Formula> parts;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    parts.push_back((value >> j) & 1 ? bits[j] : a.make_not(bits[j]));
  }
  return a.make_and(std::move(parts));
}

// Same shape one position later: X applied to each bit before comparing.
Formula next_bits_equal(FormulaArena& a, const std::vector<Formula>& bits,
                        std::uint64_t value) {
  std::vector<Formula> parts;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    Formula next_bit = a.make_next(bits[j]);
    parts.push_back((value >> j) & 1 ? next_bit : a.make_not(next_bit));
  }
  return a.make_and(std::move(parts));
}

// The ripple-carry increment law: X bit_j <-> bit_j xor (bit_0 ∧ .. ∧
// bit_{j-1}), with the empty carry reading true.
Formula increment_law(FormulaArena& a, const std::vector<Formula>& bits) {
  std::vector<Formula> parts;
  Formula carry = a.constant(true);
  for (std::size_t j = 0; j < bits.size(); ++j) {
    parts.push_back(a.make_iff(a.make_next(bits[j]), xor_of(a, bits[j], carry)));
    carry = a.make_and(carry, bits[j]);
  }
  return a.make_and(std::move(parts));
}

Formula hold_law(FormulaArena& a, const std::vector<Formula>& bits) {
  std::vector<Formula> parts;
  for (const Formula& bit : bits) {
    parts.push_back(a.make_iff(a.make_next(bit), bit));
  }
  return a.make_and(std::move(parts));
}

std::size_t bit_width_for(std::size_t distinct_values) {
  std::size_t width = 0;
  while ((std::size_t{1} << width) < distinct_values) ++width;
  return width;
}

}  // namespace

BenchmarkInstance gen_counter(std::size_t n, FormulaArena& arena,
                              bool with_inc) {
  if (n < 1 || n > 20) {
    throw std::out_of_range("gen_counter: bit count must be in [1, 20]");
  }
  std::vector<Formula> c = indexed_atoms(arena, "c", n);

  Formula at0 = bits_equal(arena, c, 0);
  Formula max = bits_equal(arena, c, (std::uint64_t{1} << n) - 1);
  Formula step = increment_law(arena, c);

  BenchmarkInstance inst;
  inst.family = "counter";
  inst.parameters = {{"n", n}};
  inst.partition.outputs = atom_names(c);
  if (!with_inc) {
    inst.name = "counter_n" + std::to_string(n);
    inst.formula = arena.make_and(at0, arena.make_until(step, max));
  } else {
    Formula inc = arena.atom("inc");
    Formula gated = arena.make_and(
        arena.make_or(arena.make_not(inc), step),
        arena.make_or(inc, hold_law(arena, c)));
    inst.name = "counter_inc_n" + std::to_string(n);
    inst.partition.inputs = {"inc"};
    inst.formula = arena.make_and(
        at0, arena.make_until(gated,
                              arena.make_or(max, arena.make_not(inc))));
  }
  return inst;
}

BenchmarkInstance gen_double_counter(std::size_t n, FormulaArena& arena) {
  if (n < 1 || n > 10) {
    throw std::out_of_range(
        "gen_double_counter: bit count must be in [1, 10]");
  }
  std::vector<Formula> c = indexed_atoms(arena, "c", n);
  std::vector<Formula> e = indexed_atoms(arena, "e", n);
  Formula add = arena.atom("add");

  Formula at0 = bits_equal(arena, c, 0);
  Formula cstep = increment_law(arena, c);

  std::vector<Formula> match_parts;
  for (std::size_t j = 0; j < n; ++j) {
    match_parts.push_back(arena.make_iff(c[j], e[j]));
  }
  Formula match = arena.make_and(std::move(match_parts));

  // The environment counter may start anywhere; afterwards `add` bumps it by
  // one, saturating at all-ones.  bump_j is the post-move value of bit j.
  // The law is phrased with weak next (!X!g): it constrains the next position
  // when one exists and holds vacuously at the last one, so a play cannot end
  // with a spurious law violation that hands the system the win for free.
  Formula emax = bits_equal(arena, e, (std::uint64_t{1} << n) - 1);
  Formula bumping = arena.make_and(add, arena.make_not(emax));
  std::vector<Formula> estep_parts;
  Formula ecarry = arena.constant(true);
  for (std::size_t j = 0; j < n; ++j) {
    Formula bump_j = arena.make_or(
        arena.make_and(bumping, xor_of(arena, e[j], ecarry)),
        arena.make_and(arena.make_not(bumping), e[j]));
    Formula weak_hi =
        arena.make_not(arena.make_next(arena.make_not(e[j])));  // next e_j, weakly
    Formula weak_lo = arena.make_not(arena.make_next(e[j]));    // next !e_j, weakly
    estep_parts.push_back(arena.make_and(
        arena.make_or(arena.make_not(bump_j), weak_hi),
        arena.make_or(bump_j, weak_lo)));
    ecarry = arena.make_and(ecarry, e[j]);
  }
  Formula estep = arena.make_and(std::move(estep_parts));

  BenchmarkInstance inst;
  inst.name = "double_n" + std::to_string(n);
  inst.family = "double_counter";
  inst.parameters = {{"n", n}};
  inst.partition.inputs = atom_names(e);
  inst.partition.inputs.push_back("add");
  inst.partition.outputs = atom_names(c);
  inst.formula = arena.make_and(
      at0, arena.make_until(
               cstep, arena.make_or(match, arena.make_not(estep))));
  return inst;
}

BenchmarkInstance gen_nim(std::size_t heaps, std::size_t tokens,
                          FormulaArena& arena) {
  if (heaps < 1 || heaps > 3 || tokens < 1 || tokens > 3) {
    throw std::out_of_range("gen_nim: heaps and tokens must be in [1, 3]");
  }
  const std::size_t value_bits = bit_width_for(tokens + 1);
  const std::size_t index_bits = bit_width_for(heaps);

  std::vector<std::vector<Formula>> heap(heaps);
  for (std::size_t i = 0; i < heaps; ++i) {
    heap[i] = indexed_atoms(arena, "h" + std::to_string(i) + "b", value_bits);
  }
  std::vector<Formula> env_heap = indexed_atoms(arena, "eh", index_bits);
  std::vector<Formula> env_amount = indexed_atoms(arena, "ea", value_bits);
  std::vector<Formula> sys_heap = indexed_atoms(arena, "sh", index_bits);
  std::vector<Formula> sys_amount = indexed_atoms(arena, "sa", value_bits);

  // take(side, i, u): that side removes exactly u tokens from heap i.  With
  // u = 0 it means "chose some other heap" (never true for a single heap).
  auto take = [&](const std::vector<Formula>& index_bits_v,
                  const std::vector<Formula>& amount_bits, std::size_t i,
                  std::size_t u) {
    Formula chose_i = bits_equal(arena, index_bits_v, i);
    if (u == 0) return arena.make_not(chose_i);
    return arena.make_and(chose_i, bits_equal(arena, amount_bits, u));
  };
  auto env_take = [&](std::size_t i, std::size_t u) {
    return take(env_heap, env_amount, i, u);
  };
  auto sys_take = [&](std::size_t i, std::size_t u) {
    return take(sys_heap, sys_amount, i, u);
  };
  auto heap_at_least = [&](std::size_t i, std::size_t v) {
    std::vector<Formula> cases;
    for (std::size_t w = v; w <= tokens; ++w) {
      cases.push_back(bits_equal(arena, heap[i], w));
    }
    return arena.make_or(std::move(cases));
  };

  // Legal environment move: a real heap, a positive amount it can cover.
  std::vector<Formula> env_legal_cases;
  for (std::size_t i = 0; i < heaps; ++i) {
    for (std::size_t u = 1; u <= tokens; ++u) {
      env_legal_cases.push_back(
          arena.make_and(env_take(i, u), heap_at_least(i, u)));
    }
  }
  Formula env_legal = arena.make_or(std::move(env_legal_cases));

  // Legal controller move: positive amount covered by what is left of the
  // chosen heap after the environment's removal.
  std::vector<Formula> sys_legal_cases;
  for (std::size_t i = 0; i < heaps; ++i) {
    for (std::size_t v = 1; v <= tokens; ++v) {
      std::vector<Formula> mid_cases;
      for (std::size_t u = 0; u + v <= tokens; ++u) {
        mid_cases.push_back(
            arena.make_and(env_take(i, u), heap_at_least(i, u + v)));
      }
      sys_legal_cases.push_back(arena.make_and(
          sys_take(i, v), arena.make_or(std::move(mid_cases))));
    }
  }
  Formula sys_legal = arena.make_or(std::move(sys_legal_cases));

  // Published-ledger law: the next letter shows each heap minus both
  // removals.  Cases never cover illegal overdraws, which is fine: those
  // positions already fail the legality predicates.
  std::vector<Formula> law_parts;
  for (std::size_t i = 0; i < heaps; ++i) {
    std::vector<Formula> cases;
    for (std::size_t w = 0; w <= tokens; ++w) {
      for (std::size_t u = 0; u <= w; ++u) {
        for (std::size_t v = 0; v + u <= w; ++v) {
          cases.push_back(arena.make_and(
              {bits_equal(arena, heap[i], w), env_take(i, u), sys_take(i, v),
               next_bits_equal(arena, heap[i], w - u - v)}));
        }
      }
    }
    law_parts.push_back(arena.make_or(std::move(cases)));
  }
  Formula law = arena.make_and(std::move(law_parts));

  // The controller's winning position: both moves legal and together they
  // drain everything.
  std::vector<Formula> drained_parts;
  for (std::size_t i = 0; i < heaps; ++i) {
    std::vector<Formula> cases;
    for (std::size_t w = 0; w <= tokens; ++w) {
      for (std::size_t u = 0; u <= w; ++u) {
        cases.push_back(arena.make_and({bits_equal(arena, heap[i], w),
                                        env_take(i, u),
                                        sys_take(i, w - u)}));
      }
    }
    drained_parts.push_back(arena.make_or(std::move(cases)));
  }
  Formula drained = arena.make_and(std::move(drained_parts));

  std::vector<Formula> full_parts;
  for (std::size_t i = 0; i < heaps; ++i) {
    full_parts.push_back(bits_equal(arena, heap[i], tokens));
  }
  Formula at_init = arena.make_and(std::move(full_parts));

  Formula round = arena.make_and({env_legal, sys_legal, law});
  Formula win = arena.make_or(arena.make_not(env_legal),
                              arena.make_and(sys_legal, drained));

  BenchmarkInstance inst;
  inst.name = "nim_p" + std::to_string(heaps) + "_q" + std::to_string(tokens);
  inst.family = "nim";
  inst.parameters = {{"heaps", heaps}, {"tokens", tokens}};
  inst.partition.inputs = atom_names(env_heap);
  for (const auto& name : atom_names(env_amount)) {
    inst.partition.inputs.push_back(name);
  }
  inst.partition.outputs = atom_names(sys_heap);
  for (const auto& name : atom_names(sys_amount)) {
    inst.partition.outputs.push_back(name);
  }
  for (std::size_t i = 0; i < heaps; ++i) {
    for (const auto& name : atom_names(heap[i])) {
      inst.partition.outputs.push_back(name);
    }
  }
  inst.formula = arena.make_and(at_init, arena.make_until(round, win));
  return inst;
}

BenchmarkInstance gen_random(std::size_t depth, std::size_t num_props,
                             std::uint64_t seed, FormulaArena& arena) {
  std::mt19937_64 rng(seed);
  std::vector<Formula> atoms = indexed_atoms(arena, "p", num_props);

  // rng() % k is pinned by the standard (mt19937_64's sequence is), unlike
  // the distribution classes, so instances are stable across toolchains.
  auto leaf = [&]() {
    std::uint64_t pick = rng() % (num_props + 2);
    if (pick < num_props) return atoms[pick];
    return arena.constant(pick == num_props);
  };
  // Two-child nodes draw left before right; leaving that to argument
  // evaluation order would let the compiler pick which subtree consumes the
  // generator first.
  auto build = [&](auto&& self, std::size_t d) -> Formula {
    if (d <= 1) return leaf();
    std::uint64_t production = rng() % 8;
    if (production == 0) return leaf();
    Formula left = self(self, d - 1);
    switch (production) {
      case 1: return arena.make_not(left);
      case 2: return arena.make_and(left, self(self, d - 1));
      case 3: return arena.make_or(left, self(self, d - 1));
      case 4: return arena.make_next(left);
      case 5: return arena.make_until(left, self(self, d - 1));
      case 6: return arena.make_finally(left);
      default: return arena.make_globally(left);
    }
  };

  BenchmarkInstance inst;
  inst.name = "random_d" + std::to_string(depth) + "_p" +
              std::to_string(num_props) + "_s" + std::to_string(seed);
  inst.family = "random";
  inst.parameters = {{"depth", depth}, {"props", num_props}, {"seed", seed}};
  inst.formula = build(build, depth);
  for (std::size_t i = 0; i < num_props; ++i) {
    auto& side = (i % 2 == 0) ? inst.partition.inputs : inst.partition.outputs;
    side.push_back(atoms[i].name());
  }
  return inst;
}

std::string ltlf_file_text(const BenchmarkInstance& inst) {
  std::ostringstream out;
  out << "# " << inst.name << "\n" << to_string(inst.formula) << "\n";
  return out.str();
}

std::string part_file_text(const Partition& p) {
  std::ostringstream out;
  out << ".inputs:";
  for (const auto& name : p.inputs) out << ' ' << name;
  out << "\n.outputs:";
  for (const auto& name : p.outputs) out << ' ' << name;
  out << "\n";
  return out.str();
}

}  // namespace lisaforge
