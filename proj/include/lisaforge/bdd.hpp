#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lisaforge/errors.hpp"

namespace lisaforge {

class BddManager;

/// Counted handle to one node of a BddManager.  Handles are the garbage
/// collector's roots and survive variable reordering: after either event a
/// handle still denotes the same Boolean function.  Within one manager,
/// equality of handles is equality of functions (the diagrams are reduced
/// and ordered, hence canonical).
class BddRef {
 public:
  BddRef() = default;
  BddRef(const BddRef& other);
  BddRef(BddRef&& other) noexcept;
  BddRef& operator=(const BddRef& other);
  BddRef& operator=(BddRef&& other) noexcept;
  ~BddRef();

  bool valid() const { return mgr_ != nullptr; }
  BddManager* manager() const { return mgr_; }
  /// Current node id.  May change across sift_reorder(); function identity
  /// is preserved, so compare handles rather than stashing raw ids.
  std::uint32_t id() const;

  bool is_zero() const;
  bool is_one() const;

  BddRef operator&(const BddRef& rhs) const;
  BddRef operator|(const BddRef& rhs) const;
  BddRef operator^(const BddRef& rhs) const;
  BddRef operator!() const;

  friend bool operator==(const BddRef& a, const BddRef& b) {
    if (a.mgr_ != b.mgr_) return false;
    if (a.mgr_ == nullptr) return true;
    return a.id() == b.id();
  }
  friend bool operator!=(const BddRef& a, const BddRef& b) { return !(a == b); }

 private:
  friend class BddManager;
  BddRef(BddManager* mgr, std::uint32_t slot) : mgr_(mgr), slot_(slot) {}

  void release();

  BddManager* mgr_ = nullptr;
  std::uint32_t slot_ = 0;
};

/// Aggregate counters exposed for benchmarking output.
struct BddStats {
  struct Counter {
    std::uint64_t lookups = 0;
    std::uint64_t hits = 0;
  };
  std::uint64_t live_nodes = 0;
  std::uint64_t peak_live_nodes = 0;
  std::uint64_t total_allocated = 0;
  std::uint64_t gc_runs = 0;
  std::uint64_t reorders = 0;
  Counter ite;
  Counter exists;
  Counter forall;
  Counter and_exists;
  Counter restrict_op;
};

/// Reduced ordered binary decision diagrams with a shared unique table,
/// an ite-based operation core with a computed cache, cube quantification,
/// variable renaming, mark-and-sweep collection rooted at live BddRefs, and
/// sifting-style reordering.  Terminals are node 0 (false) and 1 (true).
/// Not thread-safe; confine a manager to one thread.
class BddManager {
 public:
  static constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

  explicit BddManager(std::uint64_t node_budget = kDefaultNodeBudget);
  BddManager(const BddManager&) = delete;
  BddManager& operator=(const BddManager&) = delete;
  ~BddManager();

  // -- variables ------------------------------------------------------------

  /// Registers a fresh variable at the bottom of the current order and
  /// returns its id.  Ids are dense and never change; levels may (reorder).
  std::uint32_t new_var(std::string name = "");
  std::size_t num_vars() const { return var_to_level_.size(); }
  const std::string& var_name(std::uint32_t v) const;
  std::uint32_t level_of(std::uint32_t v) const;
  /// Variable ids from top of the order to the bottom.
  std::vector<std::uint32_t> current_order() const { return level_to_var_; }

  // -- node construction ----------------------------------------------------

  BddRef zero();
  BddRef one();
  /// Positive literal of a registered variable; throws std::out_of_range on
  /// an unregistered id.
  BddRef var(std::uint32_t v);
  /// Negative literal.
  BddRef nvar(std::uint32_t v);
  /// Conjunction of positive literals, for use as a quantification cube.
  BddRef cube(const std::vector<std::uint32_t>& vars);

  // -- operations -----------------------------------------------------------

  BddRef ite(const BddRef& f, const BddRef& g, const BddRef& h);
  BddRef conj(const BddRef& f, const BddRef& g);
  BddRef disj(const BddRef& f, const BddRef& g);
  BddRef negate(const BddRef& f);
  BddRef exclusive_or(const BddRef& f, const BddRef& g);
  BddRef implies(const BddRef& f, const BddRef& g);

  BddRef exists(const BddRef& f, const std::vector<std::uint32_t>& vars);
  BddRef exists(const BddRef& f, const BddRef& cube);
  BddRef forall(const BddRef& f, const std::vector<std::uint32_t>& vars);
  BddRef forall(const BddRef& f, const BddRef& cube);
  /// Relational product: exists(vars, f & g) without building f & g.
  BddRef and_exists(const BddRef& f, const BddRef& g,
                    const std::vector<std::uint32_t>& vars);
  BddRef and_exists(const BddRef& f, const BddRef& g, const BddRef& cube);

  /// Simultaneous variable substitution along an injective var->var map.
  BddRef rename(const BddRef& f,
                const std::vector<std::pair<std::uint32_t, std::uint32_t>>&
                    var_map);
  /// Cofactor of f with var fixed to value.
  BddRef restrict_var(const BddRef& f, std::uint32_t v, bool value);

  // -- inspection -----------------------------------------------------------

  /// Lexicographically least satisfying assignment over `vars` (earlier
  /// variables weigh more, false < true; unconstrained variables read false).
  /// Returns nullopt when f is unsatisfiable.  Throws std::invalid_argument
  /// if the support of f is not covered by `vars`.
  std::optional<std::vector<bool>> any_sat(
      const BddRef& f, const std::vector<std::uint32_t>& vars) const;
  /// Truth value under a total assignment indexed by variable id.
  bool eval(const BddRef& f, const std::vector<bool>& values) const;
  /// Support variable ids, outermost level first.
  std::vector<std::uint32_t> support(const BddRef& f) const;
  /// Number of distinct nodes reachable from f, terminals included
  /// (so constants count 1).
  std::uint64_t node_count(const BddRef& f) const;

  std::uint64_t live_nodes() const { return live_count_; }
  const BddStats& stats() const { return stats_; }

  // -- maintenance ----------------------------------------------------------

  void set_node_budget(std::uint64_t budget) { node_budget_ = budget; }
  std::uint64_t node_budget() const { return node_budget_; }
  /// When enabled, sifting runs automatically once the live node count has
  /// doubled since the last reorder.  Off by default.
  void set_auto_reorder(bool enabled) { auto_reorder_ = enabled; }

  /// Mark-and-sweep collection rooted at live BddRefs.  Clears the computed
  /// cache; handles stay valid.
  void collect_garbage();
  /// Rudell-style sifting: each variable in turn is moved through every
  /// position and left where the diagram rooted at the live handles is
  /// smallest.  Handles stay valid and keep their meaning.
  void sift_reorder();

 private:
  friend class BddRef;

  static constexpr std::uint32_t kTermLevel = 0xffffffffu;

  struct Node {
    std::uint32_t level;
    std::uint32_t low;
    std::uint32_t high;
  };

  enum class CacheOp : std::uint8_t {
    Ite,
    Exists,
    Forall,
    AndExists,
    Restrict,
  };

  struct CacheKey {
    std::uint8_t op;
    std::uint32_t f, g, h;
    bool operator==(const CacheKey&) const = default;
  };
  struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const {
      std::uint64_t x = (std::uint64_t(k.op) << 56) ^ (std::uint64_t(k.f) << 32) ^
                        (std::uint64_t(k.g) << 16) ^ k.h;
      x ^= x >> 33;
      x *= 0xff51afd7ed558ccdULL;
      x ^= x >> 33;
      return static_cast<std::size_t>(x);
    }
  };

  // handle slots
  std::uint32_t acquire_slot(std::uint32_t node);
  void retain_slot(std::uint32_t slot);
  void release_slot(std::uint32_t slot);
  std::uint32_t slot_node(std::uint32_t slot) const {
    return slot_nodes_[slot];
  }
  BddRef make_ref(std::uint32_t node);

  // core
  std::uint32_t mk(std::uint32_t level, std::uint32_t low, std::uint32_t high);
  std::uint32_t allocate_node(std::uint32_t level, std::uint32_t low,
                              std::uint32_t high);
  std::uint32_t ite_rec(std::uint32_t f, std::uint32_t g, std::uint32_t h);
  std::uint32_t not_rec(std::uint32_t f) { return ite_rec(f, 0, 1); }
  std::uint32_t exists_rec(std::uint32_t f, std::uint32_t cube);
  std::uint32_t forall_rec(std::uint32_t f, std::uint32_t cube);
  std::uint32_t and_exists_rec(std::uint32_t f, std::uint32_t g,
                               std::uint32_t cube);
  std::uint32_t restrict_rec(std::uint32_t f, std::uint32_t level, bool value);
  std::uint32_t rename_rec(std::uint32_t f,
                           const std::vector<std::int64_t>& var_map,
                           std::unordered_map<std::uint32_t, std::uint32_t>&
                               memo);

  std::uint32_t check_cube(const BddRef& cube) const;
  std::uint32_t build_cube(const std::vector<std::uint32_t>& vars);

  // maintenance helpers
  void before_operation();
  void apply_order(const std::vector<std::uint32_t>& level_to_var);
  std::uint64_t measure_order(const std::vector<std::uint32_t>& level_to_var,
                              const std::vector<std::uint32_t>& roots) const;

  bool is_terminal(std::uint32_t n) const { return n <= 1; }
  std::uint32_t level(std::uint32_t n) const { return nodes_[n].level; }

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_nodes_;
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> unique_;
  std::unordered_map<CacheKey, std::uint32_t, CacheKeyHash> cache_;

  std::vector<std::uint32_t> var_to_level_;
  std::vector<std::uint32_t> level_to_var_;
  std::vector<std::string> var_names_;

  std::vector<std::uint32_t> slot_nodes_;
  std::vector<std::uint32_t> slot_refs_;
  std::vector<std::uint32_t> free_slots_;

  std::uint64_t node_budget_;
  std::uint64_t live_count_ = 0;
  std::uint64_t gc_threshold_ = 1u << 18;
  std::uint64_t last_reorder_size_ = 1u << 12;
  bool auto_reorder_ = false;
  int op_depth_ = 0;

  BddStats stats_;
};

}  // namespace lisaforge
