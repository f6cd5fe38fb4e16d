#include "lisaforge/symbolic_dfa.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <deque>
#include <limits>
#include <stdexcept>

namespace lisaforge {

// ---------------------------------------------------------------------------
// VarTable
// ---------------------------------------------------------------------------

std::uint32_t VarTable::prop_var(const std::string& name) {
  auto it = props_.find(name);
  if (it != props_.end()) return it->second;
  std::uint32_t v = mgr_->new_var(name);
  props_.emplace(name, v);
  return v;
}

std::vector<std::uint32_t> VarTable::prop_vars(
    const std::vector<std::string>& names) {
  std::vector<std::uint32_t> out;
  out.reserve(names.size());
  for (const std::string& name : names) out.push_back(prop_var(name));
  return out;
}

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>
VarTable::new_state_vars(std::size_t n, std::string_view tag) {
  std::vector<std::uint32_t> z, zp;
  z.reserve(n);
  zp.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::string base = "z" + std::to_string(j);
    if (!tag.empty()) base += "@" + std::string(tag);
    z.push_back(mgr_->new_var(base));
    zp.push_back(mgr_->new_var(base + "'"));
  }
  return {std::move(z), std::move(zp)};
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

namespace {

std::size_t ceil_log2(std::uint64_t x) {
  if (x <= 1) return 0;
  return std::bit_width(x - 1);
}

BddRef disjoin_balanced(BddManager& mgr, std::vector<BddRef> parts) {
  if (parts.empty()) return mgr.zero();
  while (parts.size() > 1) {
    std::vector<BddRef> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      next.push_back(parts[i] | parts[i + 1]);
    }
    if (parts.size() % 2) next.push_back(parts.back());
    parts = std::move(next);
  }
  return parts[0];
}

BddRef state_code(BddManager& mgr, const std::vector<std::uint32_t>& bits,
                  std::uint64_t value) {
  BddRef acc = mgr.one();
  for (std::size_t j = 0; j < bits.size(); ++j) {
    acc = acc & (((value >> j) & 1u) ? mgr.var(bits[j]) : mgr.nvar(bits[j]));
  }
  return acc;
}

BddRef letter_cube(BddManager& mgr, const std::vector<std::uint32_t>& props,
                   std::uint32_t mask) {
  BddRef acc = mgr.one();
  for (std::size_t i = 0; i < props.size(); ++i) {
    acc = acc & (((mask >> i) & 1u) ? mgr.var(props[i]) : mgr.nvar(props[i]));
  }
  return acc;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

}  // namespace

SymbolicDfa encode(const ExplicitDfa& d_in, VarTable& vars,
                   std::string_view tag) {
  ExplicitDfa d = renumber_bfs(d_in);
  BddManager& mgr = vars.manager();

  SymbolicDfa s;
  s.mgr = &mgr;
  s.prop_names = d.support;
  s.prop_vars = vars.prop_vars(d.support);
  std::size_t nbits = std::max<std::size_t>(1, ceil_log2(d.num_states()));
  std::tie(s.state_vars, s.primed_vars) = vars.new_state_vars(nbits, tag);
  s.state_count_hint = d.num_states();

  s.init = state_code(mgr, s.state_vars, 0);

  const std::uint32_t letters = d.num_letters();
  std::vector<BddRef> rows;
  rows.reserve(d.num_states());
  for (std::uint32_t st = 0; st < d.num_states(); ++st) {
    // Group outgoing letters by target so each successor code is built once.
    std::unordered_map<std::uint32_t, std::vector<BddRef>> by_target;
    for (std::uint32_t m = 0; m < letters; ++m) {
      by_target[d.next(st, m)].push_back(letter_cube(mgr, s.prop_vars, m));
    }
    std::vector<BddRef> moves;
    moves.reserve(by_target.size());
    for (auto& [target, cubes] : by_target) {
      moves.push_back(disjoin_balanced(mgr, std::move(cubes)) &
                      state_code(mgr, s.primed_vars, target));
    }
    rows.push_back(state_code(mgr, s.state_vars, st) &
                   disjoin_balanced(mgr, std::move(moves)));
  }
  s.trans = disjoin_balanced(mgr, std::move(rows));

  std::vector<BddRef> finals;
  for (std::uint32_t st = 0; st < d.num_states(); ++st) {
    if (d.is_accepting(st)) {
      finals.push_back(state_code(mgr, s.state_vars, st));
    }
  }
  s.accepting = disjoin_balanced(mgr, std::move(finals));
  return s;
}

// ---------------------------------------------------------------------------
// Product
// ---------------------------------------------------------------------------

SymbolicDfa symbolic_product(const SymbolicDfa& a, const SymbolicDfa& b) {
  if (a.mgr != b.mgr) {
    throw std::invalid_argument(
        "symbolic_product: operands live in different managers");
  }
  SymbolicDfa out;
  out.mgr = a.mgr;
  out.state_vars = a.state_vars;
  out.state_vars.insert(out.state_vars.end(), b.state_vars.begin(),
                        b.state_vars.end());
  out.primed_vars = a.primed_vars;
  out.primed_vars.insert(out.primed_vars.end(), b.primed_vars.begin(),
                         b.primed_vars.end());
  // Merge the sorted proposition lists, keeping names unique.
  std::size_t i = 0, j = 0;
  while (i < a.prop_names.size() || j < b.prop_names.size()) {
    if (j >= b.prop_names.size() ||
        (i < a.prop_names.size() && a.prop_names[i] < b.prop_names[j])) {
      out.prop_names.push_back(a.prop_names[i]);
      out.prop_vars.push_back(a.prop_vars[i]);
      ++i;
    } else if (i >= a.prop_names.size() ||
               b.prop_names[j] < a.prop_names[i]) {
      out.prop_names.push_back(b.prop_names[j]);
      out.prop_vars.push_back(b.prop_vars[j]);
      ++j;
    } else {
      out.prop_names.push_back(a.prop_names[i]);
      out.prop_vars.push_back(a.prop_vars[i]);
      ++i;
      ++j;
    }
  }
  out.init = a.init & b.init;
  out.trans = a.trans & b.trans;
  out.accepting = a.accepting & b.accepting;
  out.state_count_hint =
      saturating_mul(a.state_count_hint, b.state_count_hint);
  return out;
}

// ---------------------------------------------------------------------------
// Membership and decoding
// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint32_t> concat(const std::vector<std::uint32_t>& a,
                                  const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

bool symbolic_accepts(const SymbolicDfa& s, const Trace& w) {
  BddManager& mgr = *s.mgr;
  BddRef quant = mgr.cube(concat(s.state_vars, s.prop_vars));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> unprime;
  for (std::size_t j = 0; j < s.state_vars.size(); ++j) {
    unprime.emplace_back(s.primed_vars[j], s.state_vars[j]);
  }
  BddRef cur = s.init;
  for (const Letter& letter : w) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < s.prop_names.size(); ++i) {
      if (letter.count(s.prop_names[i])) mask |= 1u << i;
    }
    BddRef step = cur & letter_cube(mgr, s.prop_vars, mask);
    BddRef image = mgr.and_exists(step, s.trans, quant);
    cur = mgr.rename(image, unprime);
  }
  return !(cur & s.accepting).is_zero();
}

ExplicitDfa to_explicit(const SymbolicDfa& s, const ExplicitLimits& limits) {
  if (s.state_vars.size() > 63) {
    throw std::invalid_argument("to_explicit: too many state variables");
  }
  BddManager& mgr = *s.mgr;
  ExplicitDfa d;
  d.support = s.prop_names;
  if (d.support.size() >= 25) {
    throw BudgetExceeded(BudgetExceeded::Kind::ExplicitStates,
                         limits.max_states);
  }
  const std::uint32_t letters = d.num_letters();

  BddRef quant = mgr.cube(concat(s.state_vars, s.prop_vars));
  auto code_value = [&](const std::vector<bool>& bits) {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if (bits[j]) v |= 1ull << j;
    }
    return v;
  };
  auto code_cube = [&](std::uint64_t value) {
    return state_code(mgr, s.state_vars, value);
  };
  auto is_final = [&](std::uint64_t value) {
    std::vector<bool> all(mgr.num_vars(), false);
    for (std::size_t j = 0; j < s.state_vars.size(); ++j) {
      all[s.state_vars[j]] = (value >> j) & 1u;
    }
    return mgr.eval(s.accepting, all);
  };

  auto initial_bits = mgr.any_sat(s.init, s.state_vars);
  if (!initial_bits) {
    throw std::invalid_argument("to_explicit: empty initial predicate");
  }

  std::unordered_map<std::uint64_t, std::uint32_t> id_of;
  std::vector<std::uint64_t> codes;
  auto intern = [&](std::uint64_t value) {
    auto it = id_of.find(value);
    if (it != id_of.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(codes.size());
    if (id + 1 > limits.max_states ||
        std::uint64_t(id + 1) * letters > limits.max_table_entries) {
      throw BudgetExceeded(BudgetExceeded::Kind::ExplicitStates,
                           limits.max_states);
    }
    id_of.emplace(value, id);
    codes.push_back(value);
    d.accepting.push_back(is_final(value) ? 1 : 0);
    return id;
  };

  intern(code_value(*initial_bits));
  d.initial = 0;
  for (std::uint32_t idx = 0; idx < codes.size(); ++idx) {
    std::uint64_t value = codes[idx];
    BddRef here = code_cube(value);
    for (std::uint32_t m = 0; m < letters; ++m) {
      BddRef step = here & letter_cube(mgr, s.prop_vars, m);
      BddRef image = mgr.and_exists(step, s.trans, quant);
      auto bits = mgr.any_sat(image, s.primed_vars);
      if (!bits) {
        throw std::invalid_argument(
            "to_explicit: missing successor (relation not total)");
      }
      d.delta.push_back(intern(code_value(*bits)));
    }
  }
  return d;
}

}  // namespace lisaforge
