#include "lisaforge/composer.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace lisaforge {

const char* to_string(ComposeMode mode) {
  switch (mode) {
    case ComposeMode::Hybrid:
      return "hybrid";
    case ComposeMode::Explicit:
      return "explicit";
    case ComposeMode::Symbolic:
      return "symbolic";
  }
  return "?";
}

bool should_switch(std::uint64_t smallest, std::uint64_t second_smallest,
                   const Thresholds& t) {
  if (smallest > t.t1) return true;
  if (second_smallest != 0 &&
      smallest > t.t2 / second_smallest) {  // smallest * second > t2
    return true;
  }
  return false;
}

namespace {

/// Min-heap over (key, insertion sequence): smallest key first, ties resolved
/// towards the older entry.
template <typename Payload>
class MinHeap {
 public:
  struct Entry {
    std::uint64_t key;
    std::uint64_t seq;
    Payload payload;
  };

  void push(std::uint64_t key, std::uint64_t seq, Payload payload) {
    entries_.push_back(Entry{key, seq, std::move(payload)});
    std::push_heap(entries_.begin(), entries_.end(), cmp);
  }

  Entry pop() {
    std::pop_heap(entries_.begin(), entries_.end(), cmp);
    Entry e = std::move(entries_.back());
    entries_.pop_back();
    return e;
  }

  std::size_t size() const { return entries_.size(); }

  std::vector<std::uint64_t> sorted_keys() const {
    std::vector<std::uint64_t> keys;
    keys.reserve(entries_.size());
    for (const Entry& e : entries_) keys.push_back(e.key);
    std::sort(keys.begin(), keys.end());
    return keys;
  }

 private:
  static bool cmp(const Entry& a, const Entry& b) {
    // std::push_heap builds a max-heap; invert to get the smallest on top.
    if (a.key != b.key) return a.key > b.key;
    return a.seq > b.seq;
  }

  std::vector<Entry> entries_;
};

}  // namespace

ComposeResult compose_dfas(std::vector<ExplicitDfa> parts, VarTable& vars,
                           Thresholds t, ComposeMode mode,
                           const ComposeOptions& options) {
  if (parts.empty()) {
    throw std::invalid_argument("compose_dfas: need at least one conjunct");
  }
  switch (mode) {
    case ComposeMode::Explicit:
      t = Thresholds{Thresholds::kUnbounded, Thresholds::kUnbounded};
      break;
    case ComposeMode::Symbolic:
      t = Thresholds{0, 0};
      break;
    case ComposeMode::Hybrid:
      break;
  }

  ComposeResult result;
  CompositionLog& log = result.log;
  log.mode = mode;
  log.thresholds = t;
  BddManager& mgr = vars.manager();

  MinHeap<ExplicitDfa> explicit_heap;
  std::uint64_t seq = 0;
  for (ExplicitDfa& part : parts) {
    std::uint64_t size = part.num_states();
    log.seed_sizes.push_back(size);
    explicit_heap.push(size, seq++, std::move(part));
  }

  std::uint32_t iteration = 0;
  std::uint32_t encode_count = 0;
  auto encode_tag = [&]() { return "d" + std::to_string(encode_count++); };

  // Explicit phase: pairwise minimised products of the two smallest.
  while (explicit_heap.size() >= 2) {
    std::vector<std::uint64_t> before = explicit_heap.sorted_keys();
    auto a = explicit_heap.pop();
    auto b = explicit_heap.pop();
    if (should_switch(a.key, b.key, t)) {
      // Put the pair back untouched (original sequence numbers, so order is
      // as if nothing had been popped) and leave the phase.
      explicit_heap.push(a.key, a.seq, std::move(a.payload));
      explicit_heap.push(b.key, b.seq, std::move(b.payload));
      log.switched = true;
      log.sizes_at_switch = explicit_heap.sorted_keys();
      break;
    }
    ExplicitDfa prod =
        minimize(product(a.payload, b.payload, options.limits));
    ++log.explicit_products;
    std::uint64_t pushed = prod.num_states();
    explicit_heap.push(pushed, seq++, std::move(prod));

    CompositionEvent ev;
    ev.kind = CompositionEvent::Kind::ExplicitPair;
    ev.iteration = ++iteration;
    ev.heap_sizes_before = std::move(before);
    ev.popped_a = a.key;
    ev.popped_b = b.key;
    ev.pushed = pushed;
    ev.minimized = true;
    ev.heap_len_after = explicit_heap.size();
    ev.bdd_nodes = mgr.live_nodes();
    log.events.push_back(std::move(ev));
  }

  if (!log.switched) {
    auto survivor = explicit_heap.pop();
    SymbolicDfa encoded = encode(survivor.payload, vars, encode_tag());

    CompositionEvent ev;
    ev.kind = CompositionEvent::Kind::Encode;
    ev.popped_a = survivor.key;
    ev.pushed = mgr.node_count(encoded.trans);
    ev.heap_len_after = 0;
    ev.bdd_nodes = mgr.live_nodes();
    log.events.push_back(std::move(ev));

    result.explicit_final = std::move(survivor.payload);
    result.dfa = std::move(encoded);
    return result;
  }

  // Switch: encode the survivors smallest-first onto the symbolic heap.
  MinHeap<SymbolicDfa> symbolic_heap;
  std::uint64_t sym_seq = 0;
  while (explicit_heap.size() > 0) {
    auto e = explicit_heap.pop();
    SymbolicDfa sym = encode(e.payload, vars, encode_tag());
    std::uint64_t tnodes = mgr.node_count(sym.trans);

    CompositionEvent ev;
    ev.kind = CompositionEvent::Kind::Encode;
    ev.popped_a = e.key;
    ev.pushed = tnodes;
    ev.bdd_nodes = mgr.live_nodes();
    symbolic_heap.push(tnodes, sym_seq++, std::move(sym));
    ev.heap_len_after = symbolic_heap.size();
    log.events.push_back(std::move(ev));
  }

  // Symbolic phase: products of the two smallest transition relations.
  while (symbolic_heap.size() >= 2) {
    std::vector<std::uint64_t> before = symbolic_heap.sorted_keys();
    auto a = symbolic_heap.pop();
    auto b = symbolic_heap.pop();
    SymbolicDfa prod = symbolic_product(a.payload, b.payload);
    ++log.symbolic_products;
    std::uint64_t pushed = mgr.node_count(prod.trans);
    symbolic_heap.push(pushed, sym_seq++, std::move(prod));

    CompositionEvent ev;
    ev.kind = CompositionEvent::Kind::SymbolicPair;
    ev.iteration = ++iteration;
    ev.heap_sizes_before = std::move(before);
    ev.popped_a = a.key;
    ev.popped_b = b.key;
    ev.pushed = pushed;
    ev.minimized = false;
    ev.heap_len_after = symbolic_heap.size();
    ev.bdd_nodes = mgr.live_nodes();
    log.events.push_back(std::move(ev));
  }

  result.dfa = std::move(symbolic_heap.pop().payload);
  return result;
}

ComposeResult compose(Formula f, VarTable& vars, Thresholds t,
                      ComposeMode mode, const ComposeOptions& options) {
  // Fix the proposition block of the variable order before any state
  // variables are allocated (callers may have pre-registered a `.part`
  // order; anything else lands in sorted order).
  for (const std::string& name : propositions(f)) {
    vars.prop_var(name);
  }
  std::vector<ExplicitDfa> parts;
  for (Formula g : split_conjuncts(f)) {
    parts.push_back(from_ltlf(g, options.limits));
  }
  return compose_dfas(std::move(parts), vars, t, mode, options);
}

// ---------------------------------------------------------------------------
// JSON lines
// ---------------------------------------------------------------------------

void CompositionLog::write_jsonl(std::ostream& os,
                                 const SymbolicDfa& result) const {
  using nlohmann::json;
  json header = {
      {"type", "header"},
      {"mode", to_string(mode)},
      {"t1", thresholds.t1},
      {"t2", thresholds.t2},
      {"conjunct_sizes", seed_sizes},
  };
  os << header.dump() << '\n';
  for (const CompositionEvent& ev : events) {
    if (ev.kind == CompositionEvent::Kind::Encode) {
      json rec = {
          {"type", "encode"},
          {"explicit_states", ev.popped_a},
          {"trans_nodes", ev.pushed},
          {"heap_len", ev.heap_len_after},
          {"bdd_nodes", ev.bdd_nodes},
      };
      os << rec.dump() << '\n';
      continue;
    }
    json rec = {
        {"type", "iteration"},
        {"iteration", ev.iteration},
        {"phase",
         ev.kind == CompositionEvent::Kind::ExplicitPair ? "explicit"
                                                         : "symbolic"},
        {"popped_sizes", {ev.popped_a, ev.popped_b}},
        {"pushed_size", ev.pushed},
        {"minimized", ev.minimized},
        {"heap_len", ev.heap_len_after},
        {"bdd_nodes", ev.bdd_nodes},
    };
    os << rec.dump() << '\n';
  }
  json footer = {
      {"type", "result"},
      {"switched", switched},
      {"explicit_products", explicit_products},
      {"symbolic_products", symbolic_products},
      {"state_vars", result.num_state_vars()},
      {"trans_nodes",
       result.mgr ? result.mgr->node_count(result.trans) : 0},
  };
  if (switched) footer["sizes_at_switch"] = sizes_at_switch;
  os << footer.dump() << '\n';
}

}  // namespace lisaforge
