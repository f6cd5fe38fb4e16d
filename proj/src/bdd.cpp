#include "lisaforge/bdd.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace lisaforge {

// ---------------------------------------------------------------------------
// BddRef
// ---------------------------------------------------------------------------

BddRef::BddRef(const BddRef& other) : mgr_(other.mgr_), slot_(other.slot_) {
  if (mgr_) mgr_->retain_slot(slot_);
}

BddRef::BddRef(BddRef&& other) noexcept : mgr_(other.mgr_), slot_(other.slot_) {
  other.mgr_ = nullptr;
  other.slot_ = 0;
}

BddRef& BddRef::operator=(const BddRef& other) {
  if (this == &other) return *this;
  if (other.mgr_) other.mgr_->retain_slot(other.slot_);
  release();
  mgr_ = other.mgr_;
  slot_ = other.slot_;
  return *this;
}

BddRef& BddRef::operator=(BddRef&& other) noexcept {
  if (this == &other) return *this;
  release();
  mgr_ = other.mgr_;
  slot_ = other.slot_;
  other.mgr_ = nullptr;
  other.slot_ = 0;
  return *this;
}

BddRef::~BddRef() { release(); }

void BddRef::release() {
  if (mgr_) {
    mgr_->release_slot(slot_);
    mgr_ = nullptr;
    slot_ = 0;
  }
}

std::uint32_t BddRef::id() const {
  if (!mgr_) throw std::logic_error("id() on an empty BddRef");
  return mgr_->slot_node(slot_);
}

bool BddRef::is_zero() const { return mgr_ && id() == 0; }
bool BddRef::is_one() const { return mgr_ && id() == 1; }

BddRef BddRef::operator&(const BddRef& rhs) const {
  return mgr_->conj(*this, rhs);
}
BddRef BddRef::operator|(const BddRef& rhs) const {
  return mgr_->disj(*this, rhs);
}
BddRef BddRef::operator^(const BddRef& rhs) const {
  return mgr_->exclusive_or(*this, rhs);
}
BddRef BddRef::operator!() const { return mgr_->negate(*this); }

// ---------------------------------------------------------------------------
// Manager basics
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kFreeLevel = 0xfffffffeu;

std::uint64_t pack_children(std::uint32_t low, std::uint32_t high) {
  return (std::uint64_t(low) << 32) | high;
}

struct OpDepthGuard {
  explicit OpDepthGuard(int& depth) : depth_(depth) { ++depth_; }
  ~OpDepthGuard() { --depth_; }
  int& depth_;
};

}  // namespace

BddManager::BddManager(std::uint64_t node_budget) : node_budget_(node_budget) {
  nodes_.push_back(Node{kTermLevel, 0, 0});  // 0 = false
  nodes_.push_back(Node{kTermLevel, 1, 1});  // 1 = true
}

BddManager::~BddManager() = default;

std::uint32_t BddManager::new_var(std::string name) {
  std::uint32_t v = static_cast<std::uint32_t>(var_to_level_.size());
  if (name.empty()) name = "v" + std::to_string(v);
  var_to_level_.push_back(static_cast<std::uint32_t>(level_to_var_.size()));
  level_to_var_.push_back(v);
  var_names_.push_back(std::move(name));
  unique_.emplace_back();
  return v;
}

const std::string& BddManager::var_name(std::uint32_t v) const {
  return var_names_.at(v);
}

std::uint32_t BddManager::level_of(std::uint32_t v) const {
  return var_to_level_.at(v);
}

// ---------------------------------------------------------------------------
// Handle slots
// ---------------------------------------------------------------------------

std::uint32_t BddManager::acquire_slot(std::uint32_t node) {
  std::uint32_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
    slot_nodes_[slot] = node;
    slot_refs_[slot] = 1;
  } else {
    slot = static_cast<std::uint32_t>(slot_nodes_.size());
    slot_nodes_.push_back(node);
    slot_refs_.push_back(1);
  }
  return slot;
}

void BddManager::retain_slot(std::uint32_t slot) { ++slot_refs_[slot]; }

void BddManager::release_slot(std::uint32_t slot) {
  if (--slot_refs_[slot] == 0) free_slots_.push_back(slot);
}

BddRef BddManager::make_ref(std::uint32_t node) {
  return BddRef(this, acquire_slot(node));
}

// ---------------------------------------------------------------------------
// Node store
// ---------------------------------------------------------------------------

std::uint32_t BddManager::allocate_node(std::uint32_t lvl, std::uint32_t low,
                                        std::uint32_t high) {
  if (live_count_ >= node_budget_) {
    throw BudgetExceeded(BudgetExceeded::Kind::BddNodes, node_budget_);
  }
  std::uint32_t id;
  if (!free_nodes_.empty()) {
    id = free_nodes_.back();
    free_nodes_.pop_back();
    nodes_[id] = Node{lvl, low, high};
  } else {
    id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{lvl, low, high});
  }
  ++live_count_;
  ++stats_.total_allocated;
  stats_.peak_live_nodes = std::max(stats_.peak_live_nodes, live_count_);
  return id;
}

std::uint32_t BddManager::mk(std::uint32_t lvl, std::uint32_t low,
                             std::uint32_t high) {
  if (low == high) return low;
  auto& table = unique_[lvl];
  std::uint64_t key = pack_children(low, high);
  auto it = table.find(key);
  if (it != table.end()) return it->second;
  std::uint32_t id = allocate_node(lvl, low, high);
  table.emplace(key, id);
  return id;
}

// ---------------------------------------------------------------------------
// Maintenance
// ---------------------------------------------------------------------------

void BddManager::before_operation() {
  if (op_depth_ > 0) return;
  if (live_count_ >= gc_threshold_) {
    collect_garbage();
    gc_threshold_ = std::max<std::uint64_t>(1u << 18, live_count_ * 2);
    if (live_count_ >= node_budget_) {
      throw BudgetExceeded(BudgetExceeded::Kind::BddNodes, node_budget_);
    }
  }
  if (auto_reorder_ &&
      live_count_ >= std::max<std::uint64_t>(4096, last_reorder_size_ * 2)) {
    sift_reorder();
  }
}

void BddManager::collect_garbage() {
  assert(op_depth_ == 0 && "collection during an operation would drop "
                           "intermediate results");
  std::vector<char> marked(nodes_.size(), 0);
  std::vector<std::uint32_t> stack;
  for (std::size_t slot = 0; slot < slot_nodes_.size(); ++slot) {
    if (slot_refs_[slot] > 0) stack.push_back(slot_nodes_[slot]);
  }
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    if (marked[n]) continue;
    marked[n] = 1;
    if (!is_terminal(n)) {
      stack.push_back(nodes_[n].low);
      stack.push_back(nodes_[n].high);
    }
  }
  for (std::uint32_t n = 2; n < nodes_.size(); ++n) {
    if (nodes_[n].level == kFreeLevel || marked[n]) continue;
    unique_[nodes_[n].level].erase(pack_children(nodes_[n].low, nodes_[n].high));
    nodes_[n].level = kFreeLevel;
    free_nodes_.push_back(n);
    --live_count_;
  }
  cache_.clear();
  ++stats_.gc_runs;
  stats_.live_nodes = live_count_;
}

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

std::uint32_t BddManager::ite_rec(std::uint32_t f, std::uint32_t g,
                                  std::uint32_t h) {
  if (f == 1) return g;
  if (f == 0) return h;
  if (g == h) return g;
  if (f == g) g = 1;  // ite(f, f, h) == ite(f, 1, h)
  if (f == h) h = 0;  // ite(f, g, f) == ite(f, g, 0)
  if (g == 1 && h == 0) return f;

  CacheKey key{static_cast<std::uint8_t>(CacheOp::Ite), f, g, h};
  ++stats_.ite.lookups;
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.ite.hits;
    return it->second;
  }

  std::uint32_t top = std::min({level(f), level(g), level(h)});
  auto cof = [&](std::uint32_t n, bool hi) {
    if (level(n) != top) return n;
    return hi ? nodes_[n].high : nodes_[n].low;
  };
  std::uint32_t lo = ite_rec(cof(f, false), cof(g, false), cof(h, false));
  std::uint32_t hi = ite_rec(cof(f, true), cof(g, true), cof(h, true));
  std::uint32_t r = mk(top, lo, hi);
  cache_.emplace(key, r);
  return r;
}

std::uint32_t BddManager::exists_rec(std::uint32_t f, std::uint32_t cube) {
  if (is_terminal(f)) return f;
  while (!is_terminal(cube) && level(cube) < level(f)) {
    cube = nodes_[cube].high;
  }
  if (is_terminal(cube)) return f;

  CacheKey key{static_cast<std::uint8_t>(CacheOp::Exists), f, cube, 0};
  ++stats_.exists.lookups;
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.exists.hits;
    return it->second;
  }

  std::uint32_t r;
  if (level(f) == level(cube)) {
    std::uint32_t a = exists_rec(nodes_[f].low, nodes_[cube].high);
    std::uint32_t b =
        a == 1 ? 1 : exists_rec(nodes_[f].high, nodes_[cube].high);
    r = ite_rec(a, 1, b);
  } else {
    r = mk(level(f), exists_rec(nodes_[f].low, cube),
           exists_rec(nodes_[f].high, cube));
  }
  cache_.emplace(key, r);
  return r;
}

std::uint32_t BddManager::forall_rec(std::uint32_t f, std::uint32_t cube) {
  if (is_terminal(f)) return f;
  while (!is_terminal(cube) && level(cube) < level(f)) {
    cube = nodes_[cube].high;
  }
  if (is_terminal(cube)) return f;

  CacheKey key{static_cast<std::uint8_t>(CacheOp::Forall), f, cube, 0};
  ++stats_.forall.lookups;
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.forall.hits;
    return it->second;
  }

  std::uint32_t r;
  if (level(f) == level(cube)) {
    std::uint32_t a = forall_rec(nodes_[f].low, nodes_[cube].high);
    std::uint32_t b =
        a == 0 ? 0 : forall_rec(nodes_[f].high, nodes_[cube].high);
    r = ite_rec(a, b, 0);
  } else {
    r = mk(level(f), forall_rec(nodes_[f].low, cube),
           forall_rec(nodes_[f].high, cube));
  }
  cache_.emplace(key, r);
  return r;
}

std::uint32_t BddManager::and_exists_rec(std::uint32_t f, std::uint32_t g,
                                         std::uint32_t cube) {
  if (f == 0 || g == 0) return 0;
  if (f == 1) return exists_rec(g, cube);
  if (g == 1) return exists_rec(f, cube);
  if (f == g) return exists_rec(f, cube);
  if (f > g) std::swap(f, g);  // conjunction commutes; canonical cache key

  std::uint32_t top = std::min(level(f), level(g));
  while (!is_terminal(cube) && level(cube) < top) {
    cube = nodes_[cube].high;
  }
  if (is_terminal(cube)) return ite_rec(f, g, 0);

  CacheKey key{static_cast<std::uint8_t>(CacheOp::AndExists), f, g, cube};
  ++stats_.and_exists.lookups;
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.and_exists.hits;
    return it->second;
  }

  auto cof = [&](std::uint32_t n, bool hi) {
    if (level(n) != top) return n;
    return hi ? nodes_[n].high : nodes_[n].low;
  };
  std::uint32_t r;
  if (top == level(cube)) {
    std::uint32_t rest = nodes_[cube].high;
    std::uint32_t a = and_exists_rec(cof(f, false), cof(g, false), rest);
    std::uint32_t b =
        a == 1 ? 1 : and_exists_rec(cof(f, true), cof(g, true), rest);
    r = ite_rec(a, 1, b);
  } else {
    r = mk(top, and_exists_rec(cof(f, false), cof(g, false), cube),
           and_exists_rec(cof(f, true), cof(g, true), cube));
  }
  cache_.emplace(key, r);
  return r;
}

std::uint32_t BddManager::restrict_rec(std::uint32_t f, std::uint32_t lvl,
                                       bool value) {
  if (is_terminal(f) || level(f) > lvl) return f;
  if (level(f) == lvl) return value ? nodes_[f].high : nodes_[f].low;

  CacheKey key{static_cast<std::uint8_t>(CacheOp::Restrict), f,
               lvl * 2 + (value ? 1u : 0u), 0};
  ++stats_.restrict_op.lookups;
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.restrict_op.hits;
    return it->second;
  }
  std::uint32_t r = mk(level(f), restrict_rec(nodes_[f].low, lvl, value),
                       restrict_rec(nodes_[f].high, lvl, value));
  cache_.emplace(key, r);
  return r;
}

std::uint32_t BddManager::rename_rec(
    std::uint32_t f, const std::vector<std::int64_t>& var_map,
    std::unordered_map<std::uint32_t, std::uint32_t>& memo) {
  if (is_terminal(f)) return f;
  if (auto it = memo.find(f); it != memo.end()) return it->second;
  std::uint32_t x = level_to_var_[level(f)];
  std::uint32_t y = var_map[x] < 0 ? x : static_cast<std::uint32_t>(var_map[x]);
  std::uint32_t lo = rename_rec(nodes_[f].low, var_map, memo);
  std::uint32_t hi = rename_rec(nodes_[f].high, var_map, memo);
  std::uint32_t vnode = mk(var_to_level_[y], 0, 1);
  std::uint32_t r = ite_rec(vnode, hi, lo);
  memo.emplace(f, r);
  return r;
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

namespace {

void check_manager(const BddManager* self, const BddRef& r) {
  if (r.manager() != self) {
    throw std::invalid_argument("BddRef belongs to a different manager");
  }
}

}  // namespace

BddRef BddManager::zero() { return make_ref(0); }
BddRef BddManager::one() { return make_ref(1); }

BddRef BddManager::var(std::uint32_t v) {
  if (v >= num_vars()) throw std::out_of_range("unregistered bdd variable");
  return make_ref(mk(var_to_level_[v], 0, 1));
}

BddRef BddManager::nvar(std::uint32_t v) {
  if (v >= num_vars()) throw std::out_of_range("unregistered bdd variable");
  return make_ref(mk(var_to_level_[v], 1, 0));
}

std::uint32_t BddManager::build_cube(const std::vector<std::uint32_t>& vars) {
  std::vector<std::uint32_t> sorted = vars;
  for (std::uint32_t v : sorted) {
    if (v >= num_vars()) throw std::out_of_range("unregistered bdd variable");
  }
  std::sort(sorted.begin(), sorted.end(), [&](std::uint32_t a, std::uint32_t b) {
    return var_to_level_[a] > var_to_level_[b];
  });
  std::uint32_t acc = 1;
  for (std::uint32_t v : sorted) {
    acc = mk(var_to_level_[v], 0, acc);
  }
  return acc;
}

BddRef BddManager::cube(const std::vector<std::uint32_t>& vars) {
  return make_ref(build_cube(vars));
}

std::uint32_t BddManager::check_cube(const BddRef& cube) const {
  std::uint32_t n = cube.id();
  std::uint32_t c = n;
  while (!is_terminal(c)) {
    if (nodes_[c].low != 0) {
      throw std::invalid_argument(
          "quantification cube must be a conjunction of positive literals");
    }
    c = nodes_[c].high;
  }
  if (c != 1) {
    throw std::invalid_argument("quantification cube must not be false");
  }
  return n;
}

BddRef BddManager::ite(const BddRef& f, const BddRef& g, const BddRef& h) {
  check_manager(this, f);
  check_manager(this, g);
  check_manager(this, h);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(ite_rec(f.id(), g.id(), h.id()));
}

BddRef BddManager::conj(const BddRef& f, const BddRef& g) {
  check_manager(this, f);
  check_manager(this, g);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(ite_rec(f.id(), g.id(), 0));
}

BddRef BddManager::disj(const BddRef& f, const BddRef& g) {
  check_manager(this, f);
  check_manager(this, g);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(ite_rec(f.id(), 1, g.id()));
}

BddRef BddManager::negate(const BddRef& f) {
  check_manager(this, f);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(not_rec(f.id()));
}

BddRef BddManager::exclusive_or(const BddRef& f, const BddRef& g) {
  check_manager(this, f);
  check_manager(this, g);
  before_operation();
  OpDepthGuard guard(op_depth_);
  std::uint32_t ng = not_rec(g.id());
  return make_ref(ite_rec(f.id(), ng, g.id()));
}

BddRef BddManager::implies(const BddRef& f, const BddRef& g) {
  check_manager(this, f);
  check_manager(this, g);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(ite_rec(f.id(), g.id(), 1));
}

BddRef BddManager::exists(const BddRef& f,
                          const std::vector<std::uint32_t>& vars) {
  check_manager(this, f);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(exists_rec(f.id(), build_cube(vars)));
}

BddRef BddManager::exists(const BddRef& f, const BddRef& cube) {
  check_manager(this, f);
  check_manager(this, cube);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(exists_rec(f.id(), check_cube(cube)));
}

BddRef BddManager::forall(const BddRef& f,
                          const std::vector<std::uint32_t>& vars) {
  check_manager(this, f);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(forall_rec(f.id(), build_cube(vars)));
}

BddRef BddManager::forall(const BddRef& f, const BddRef& cube) {
  check_manager(this, f);
  check_manager(this, cube);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(forall_rec(f.id(), check_cube(cube)));
}

BddRef BddManager::and_exists(const BddRef& f, const BddRef& g,
                              const std::vector<std::uint32_t>& vars) {
  check_manager(this, f);
  check_manager(this, g);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(and_exists_rec(f.id(), g.id(), build_cube(vars)));
}

BddRef BddManager::and_exists(const BddRef& f, const BddRef& g,
                              const BddRef& cube) {
  check_manager(this, f);
  check_manager(this, g);
  check_manager(this, cube);
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(and_exists_rec(f.id(), g.id(), check_cube(cube)));
}

BddRef BddManager::rename(
    const BddRef& f,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& var_map) {
  check_manager(this, f);
  std::vector<std::int64_t> map(num_vars(), -1);
  std::vector<char> target_used(num_vars(), 0);
  for (auto [from, to] : var_map) {
    if (from >= num_vars() || to >= num_vars()) {
      throw std::out_of_range("rename: unregistered bdd variable");
    }
    if (map[from] >= 0) {
      throw std::invalid_argument("rename: duplicate source variable");
    }
    if (target_used[to]) {
      throw std::invalid_argument("rename: map is not injective");
    }
    map[from] = to;
    target_used[to] = 1;
  }
  before_operation();
  OpDepthGuard guard(op_depth_);
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  return make_ref(rename_rec(f.id(), map, memo));
}

BddRef BddManager::restrict_var(const BddRef& f, std::uint32_t v, bool value) {
  check_manager(this, f);
  if (v >= num_vars()) throw std::out_of_range("unregistered bdd variable");
  before_operation();
  OpDepthGuard guard(op_depth_);
  return make_ref(restrict_rec(f.id(), var_to_level_[v], value));
}

// ---------------------------------------------------------------------------
// Inspection
// ---------------------------------------------------------------------------

std::optional<std::vector<bool>> BddManager::any_sat(
    const BddRef& f, const std::vector<std::uint32_t>& vars) const {
  check_manager(this, f);
  std::vector<std::int8_t> assigned(num_vars(), -1);

  // DFS satisfiability check under the current partial assignment.
  auto satisfiable = [&](std::uint32_t root) {
    std::unordered_map<std::uint32_t, bool> memo;
    auto rec = [&](auto&& self, std::uint32_t n) -> bool {
      if (n == 1) return true;
      if (n == 0) return false;
      if (auto it = memo.find(n); it != memo.end()) return it->second;
      std::uint32_t v = level_to_var_[nodes_[n].level];
      bool r;
      if (assigned[v] >= 0) {
        r = self(self, assigned[v] ? nodes_[n].high : nodes_[n].low);
      } else {
        r = self(self, nodes_[n].low) || self(self, nodes_[n].high);
      }
      memo.emplace(n, r);
      return r;
    };
    return rec(rec, root);
  };

  std::uint32_t root = f.id();
  if (root == 0) return std::nullopt;
  for (std::uint32_t v : vars) {
    if (v >= num_vars()) throw std::out_of_range("unregistered bdd variable");
  }
  std::vector<bool> out(vars.size(), false);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    assigned[vars[i]] = 0;
    if (!satisfiable(root)) {
      assigned[vars[i]] = 1;
      out[i] = true;
    }
  }
  // The assignment must now pin the whole support.
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<std::uint32_t> stack{root};
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    if (is_terminal(n) || seen[n]) continue;
    seen[n] = 1;
    std::uint32_t v = level_to_var_[nodes_[n].level];
    if (assigned[v] < 0) {
      throw std::invalid_argument(
          "any_sat: support of f is not covered by the given variables");
    }
    stack.push_back(assigned[v] ? nodes_[n].high : nodes_[n].low);
  }
  return out;
}

bool BddManager::eval(const BddRef& f, const std::vector<bool>& values) const {
  check_manager(this, f);
  if (values.size() != num_vars()) {
    throw std::invalid_argument("eval: assignment must cover every variable");
  }
  std::uint32_t n = f.id();
  while (!is_terminal(n)) {
    std::uint32_t v = level_to_var_[nodes_[n].level];
    n = values[v] ? nodes_[n].high : nodes_[n].low;
  }
  return n == 1;
}

std::vector<std::uint32_t> BddManager::support(const BddRef& f) const {
  check_manager(this, f);
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<char> at_level(level_to_var_.size(), 0);
  std::vector<std::uint32_t> stack{f.id()};
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    if (is_terminal(n) || seen[n]) continue;
    seen[n] = 1;
    at_level[nodes_[n].level] = 1;
    stack.push_back(nodes_[n].low);
    stack.push_back(nodes_[n].high);
  }
  std::vector<std::uint32_t> out;
  for (std::size_t lvl = 0; lvl < at_level.size(); ++lvl) {
    if (at_level[lvl]) out.push_back(level_to_var_[lvl]);
  }
  return out;
}

std::uint64_t BddManager::node_count(const BddRef& f) const {
  check_manager(this, f);
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<std::uint32_t> stack{f.id()};
  std::uint64_t count = 0;
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = 1;
    ++count;
    if (!is_terminal(n)) {
      stack.push_back(nodes_[n].low);
      stack.push_back(nodes_[n].high);
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Reordering
// ---------------------------------------------------------------------------

namespace {

/// Scratch store used to rebuild diagrams under a candidate variable order.
/// Rebuilding composes old nodes bottom-up with a local ite, so it works for
/// arbitrary permutations, not just adjacent swaps.
struct Rebuilder {
  struct Node {
    std::uint32_t level, low, high;
  };
  struct Key {
    std::uint32_t f, g, h;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t x = (std::uint64_t(k.f) << 42) ^ (std::uint64_t(k.g) << 21) ^
                        k.h;
      x ^= x >> 33;
      x *= 0xff51afd7ed558ccdULL;
      x ^= x >> 29;
      return static_cast<std::size_t>(x);
    }
  };
  static constexpr std::uint32_t kTerm = 0xffffffffu;

  std::vector<Node> nodes;
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> unique;
  std::unordered_map<Key, std::uint32_t, KeyHash> ite_cache;
  std::unordered_map<std::uint32_t, std::uint32_t> transfer_memo;

  explicit Rebuilder(std::size_t num_levels) : unique(num_levels) {
    nodes.push_back(Node{kTerm, 0, 0});
    nodes.push_back(Node{kTerm, 1, 1});
  }

  std::uint32_t level(std::uint32_t n) const { return nodes[n].level; }

  std::uint32_t mk(std::uint32_t lvl, std::uint32_t low, std::uint32_t high) {
    if (low == high) return low;
    auto& table = unique[lvl];
    std::uint64_t key = pack_children(low, high);
    auto it = table.find(key);
    if (it != table.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back(Node{lvl, low, high});
    table.emplace(key, id);
    return id;
  }

  std::uint32_t ite(std::uint32_t f, std::uint32_t g, std::uint32_t h) {
    if (f == 1) return g;
    if (f == 0) return h;
    if (g == h) return g;
    if (g == 1 && h == 0) return f;
    Key key{f, g, h};
    if (auto it = ite_cache.find(key); it != ite_cache.end()) return it->second;
    std::uint32_t top = std::min({level(f), level(g), level(h)});
    auto cof = [&](std::uint32_t n, bool hi) {
      if (level(n) != top) return n;
      return hi ? nodes[n].high : nodes[n].low;
    };
    std::uint32_t r = mk(top, ite(cof(f, false), cof(g, false), cof(h, false)),
                         ite(cof(f, true), cof(g, true), cof(h, true)));
    ite_cache.emplace(key, r);
    return r;
  }
};

}  // namespace

std::uint64_t BddManager::measure_order(
    const std::vector<std::uint32_t>& level_to_var,
    const std::vector<std::uint32_t>& roots) const {
  std::vector<std::uint32_t> var_to_new_level(num_vars());
  for (std::uint32_t lvl = 0; lvl < level_to_var.size(); ++lvl) {
    var_to_new_level[level_to_var[lvl]] = lvl;
  }
  Rebuilder rb(level_to_var.size());
  auto transfer = [&](auto&& self, std::uint32_t old) -> std::uint32_t {
    if (is_terminal(old)) return old;
    if (auto it = rb.transfer_memo.find(old); it != rb.transfer_memo.end()) {
      return it->second;
    }
    std::uint32_t x = level_to_var_[nodes_[old].level];
    std::uint32_t lo = self(self, nodes_[old].low);
    std::uint32_t hi = self(self, nodes_[old].high);
    std::uint32_t vnode = rb.mk(var_to_new_level[x], 0, 1);
    std::uint32_t r = rb.ite(vnode, hi, lo);
    rb.transfer_memo.emplace(old, r);
    return r;
  };
  std::vector<std::uint32_t> rebuilt;
  rebuilt.reserve(roots.size());
  for (std::uint32_t root : roots) rebuilt.push_back(transfer(transfer, root));
  // Count only what the rebuilt roots reach.  The rebuilder also allocates
  // transient nodes (its ite pushes, literal nodes per variable), and those
  // pile up more under a permuted order than under the current one; counting
  // them would make every candidate look worse than it is.
  std::vector<char> seen(rb.nodes.size(), 0);
  std::uint64_t reachable = 0;
  std::vector<std::uint32_t> stack(rebuilt);
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    if (n <= 1 || seen[n]) continue;
    seen[n] = 1;
    ++reachable;
    stack.push_back(rb.nodes[n].low);
    stack.push_back(rb.nodes[n].high);
  }
  return reachable;
}

void BddManager::apply_order(const std::vector<std::uint32_t>& level_to_var) {
  std::vector<std::uint32_t> var_to_new_level(num_vars());
  for (std::uint32_t lvl = 0; lvl < level_to_var.size(); ++lvl) {
    var_to_new_level[level_to_var[lvl]] = lvl;
  }
  Rebuilder rb(level_to_var.size());
  auto transfer = [&](auto&& self, std::uint32_t old) -> std::uint32_t {
    if (is_terminal(old)) return old;
    if (auto it = rb.transfer_memo.find(old); it != rb.transfer_memo.end()) {
      return it->second;
    }
    std::uint32_t x = level_to_var_[nodes_[old].level];
    std::uint32_t lo = self(self, nodes_[old].low);
    std::uint32_t hi = self(self, nodes_[old].high);
    std::uint32_t vnode = rb.mk(var_to_new_level[x], 0, 1);
    std::uint32_t r = rb.ite(vnode, hi, lo);
    rb.transfer_memo.emplace(old, r);
    return r;
  };
  for (std::size_t slot = 0; slot < slot_nodes_.size(); ++slot) {
    if (slot_refs_[slot] > 0) transfer(transfer, slot_nodes_[slot]);
  }
  // Swap the rebuilt store in and re-point the live handles.
  std::vector<Node> new_nodes;
  new_nodes.reserve(rb.nodes.size());
  for (const Rebuilder::Node& n : rb.nodes) {
    new_nodes.push_back(Node{n.level, n.low, n.high});
  }
  new_nodes[0].level = kTermLevel;
  new_nodes[1].level = kTermLevel;
  nodes_ = std::move(new_nodes);
  unique_ = std::move(rb.unique);
  free_nodes_.clear();
  cache_.clear();
  live_count_ = nodes_.size() - 2;
  stats_.peak_live_nodes = std::max(stats_.peak_live_nodes, live_count_);
  for (std::size_t slot = 0; slot < slot_nodes_.size(); ++slot) {
    if (slot_refs_[slot] > 0) {
      std::uint32_t old = slot_nodes_[slot];
      slot_nodes_[slot] = is_terminal(old) ? old : rb.transfer_memo.at(old);
    }
  }
  level_to_var_ = level_to_var;
  for (std::uint32_t lvl = 0; lvl < level_to_var_.size(); ++lvl) {
    var_to_level_[level_to_var_[lvl]] = lvl;
  }
  // The rebuild leaves its transient nodes behind; sweep them right away so
  // live_nodes() reflects the diagrams the handles actually denote.
  collect_garbage();
}

void BddManager::sift_reorder() {
  assert(op_depth_ == 0 && "cannot reorder during an operation");
  if (num_vars() <= 1) return;

  std::vector<std::uint32_t> roots;
  {
    std::vector<char> seen_root(nodes_.size(), 0);
    for (std::size_t slot = 0; slot < slot_nodes_.size(); ++slot) {
      std::uint32_t n = slot_nodes_[slot];
      if (slot_refs_[slot] > 0 && !is_terminal(n) && !seen_root[n]) {
        seen_root[n] = 1;
        roots.push_back(n);
      }
    }
  }
  if (roots.empty()) return;

  // Process the most populated variables first (snapshot of current sizes).
  std::vector<std::uint64_t> occupancy(num_vars(), 0);
  {
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<std::uint32_t> stack(roots);
    while (!stack.empty()) {
      std::uint32_t n = stack.back();
      stack.pop_back();
      if (is_terminal(n) || seen[n]) continue;
      seen[n] = 1;
      ++occupancy[level_to_var_[nodes_[n].level]];
      stack.push_back(nodes_[n].low);
      stack.push_back(nodes_[n].high);
    }
  }
  std::vector<std::uint32_t> vars_by_occupancy;
  for (std::uint32_t v = 0; v < num_vars(); ++v) {
    if (occupancy[v] > 0) vars_by_occupancy.push_back(v);
  }
  std::sort(vars_by_occupancy.begin(), vars_by_occupancy.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              return occupancy[a] > occupancy[b];
            });

  std::vector<std::uint32_t> order = level_to_var_;
  std::uint64_t best_total = measure_order(order, roots);
  for (std::uint32_t v : vars_by_occupancy) {
    std::size_t cur =
        std::find(order.begin(), order.end(), v) - order.begin();
    std::size_t best_pos = cur;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      if (pos == cur) continue;
      std::vector<std::uint32_t> candidate = order;
      candidate.erase(candidate.begin() + cur);
      candidate.insert(candidate.begin() + pos, v);
      std::uint64_t size = measure_order(candidate, roots);
      if (size < best_total) {
        best_total = size;
        best_pos = pos;
      }
    }
    if (best_pos != cur) {
      order.erase(order.begin() + cur);
      order.insert(order.begin() + best_pos, v);
    }
  }
  apply_order(order);
  last_reorder_size_ = std::max<std::uint64_t>(live_count_, 1);
  ++stats_.reorders;
}

}  // namespace lisaforge
