#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace forge {

enum class NodeId : std::uint32_t {};
enum class SymbolId : std::uint32_t {};

inline constexpr std::uint32_t to_index(NodeId id) { return static_cast<std::uint32_t>(id); }
inline constexpr std::uint32_t to_index(SymbolId id) { return static_cast<std::uint32_t>(id); }

enum class ExprKind : std::uint8_t {
  Lam,
  App,
  Var,         // de Bruijn index $i
  ShiftedVar,  // &i, signed, only inside hole bindings
  Prim,
  AbsVar,      // abstraction variable (printed as α<k>)
  Hole,        // ??<k>
};

/// A single hash-consed node. `payload` is the variable index, symbol id or
/// hole / abstraction-variable id depending on `kind`; `left` is the lambda
/// body or application function, `right` the application argument.
struct Node {
  ExprKind kind;
  std::int32_t payload = 0;
  NodeId left{};
  NodeId right{};

  bool operator==(const Node&) const = default;
};

struct CostParams {
  std::int64_t cost_lam = 1;
  std::int64_t cost_app = 1;
  std::int64_t cost_var = 100;
  std::int64_t cost_absvar = 100;
  std::int64_t cost_prim_default = 100;
  std::unordered_map<std::string, std::int64_t> cost_prim;

  std::int64_t prim_cost(std::string_view symbol) const;
  /// Throws std::invalid_argument if any cost is negative.
  void validate() const;
  /// True when every leaf that can appear in an abstraction body has a
  /// positive cost, so any complete abstraction costs at least 1.
  bool leaves_positive() const;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Append-only arena of structurally unique expression nodes.
///
/// Node ids are stable for the lifetime of the store and two structurally
/// equal trees always share an id, so syntactic equality is id equality.
/// Every node carries cached metrics computed once at insertion.
///
/// Insertion is single-writer. Concurrent reads are safe as long as no thread
/// inserts at the same time; the search phase only reads.
class ExprStore {
 public:
  explicit ExprStore(CostParams params = {});

  NodeId lam(NodeId body);
  NodeId app(NodeId fun, NodeId arg);
  NodeId var(std::int32_t index);
  NodeId shifted_var(std::int32_t index);
  NodeId prim(std::string_view symbol);
  NodeId prim(SymbolId symbol);
  NodeId absvar(std::int32_t id);
  NodeId hole(std::int32_t id);

  /// Left-associated application `(f a0 a1 ...)`.
  NodeId apply(NodeId fun, const std::vector<NodeId>& args);

  SymbolId intern(std::string_view symbol);
  std::optional<SymbolId> find_symbol(std::string_view symbol) const;
  std::string_view symbol(SymbolId id) const { return symbols_[to_index(id)]; }
  std::int64_t symbol_cost(SymbolId id) const { return symbol_costs_[to_index(id)]; }

  const Node& node(NodeId id) const { return nodes_[to_index(id)]; }
  ExprKind kind(NodeId id) const { return nodes_[to_index(id)].kind; }
  std::size_t size() const { return nodes_.size(); }
  const CostParams& params() const { return params_; }

  /// Cost under the store's parameters.
  std::int64_t cost(NodeId id) const { return info_[to_index(id)].cost; }
  /// Number of `Prim` and `Var` leaves.
  std::uint32_t terminals(NodeId id) const { return info_[to_index(id)].terminals; }
  /// Longest root-to-leaf path in edges.
  std::uint32_t depth(NodeId id) const { return info_[to_index(id)].depth; }
  /// Number of nodes in the tree (occurrences, not unique ids).
  std::uint32_t tree_size(NodeId id) const { return info_[to_index(id)].tree_size; }
  /// One more than the largest free `$i` relative to this node; 0 if closed.
  std::int32_t free_bound(NodeId id) const;
  /// Smallest free `$i` relative to this node, or int32 max if closed.
  std::int32_t min_free(NodeId id) const;
  bool closed(NodeId id) const { return info_[to_index(id)].free_mask == 0; }
  bool has_absvar(NodeId id) const { return info_[to_index(id)].flags & kHasAbsVar; }
  bool has_hole(NodeId id) const { return info_[to_index(id)].flags & kHasHole; }
  bool has_shifted(NodeId id) const { return info_[to_index(id)].flags & kHasShifted; }
  /// Contains only Lam, App, Var and Prim.
  bool is_pure(NodeId id) const { return (info_[to_index(id)].flags & (kHasAbsVar | kHasHole | kHasShifted)) == 0; }

 private:
  static constexpr std::uint8_t kHasAbsVar = 1;
  static constexpr std::uint8_t kHasHole = 2;
  static constexpr std::uint8_t kHasShifted = 4;
  // Free de Bruijn indices 0..62 are tracked exactly; bit 63 is a sticky
  // marker for any free index >= 63.
  static constexpr std::uint64_t kOverflowBit = std::uint64_t{1} << 63;

  struct NodeInfo {
    std::int64_t cost;
    std::uint64_t free_mask;
    std::uint32_t terminals;
    std::uint32_t depth;
    std::uint32_t tree_size;
    std::uint8_t flags;
  };

  struct NodeHash {
    std::size_t operator()(const Node& n) const noexcept;
  };

  NodeId insert(const Node& n);
  NodeInfo compute_info(const Node& n) const;

  CostParams params_;
  std::vector<Node> nodes_;
  std::vector<NodeInfo> info_;
  std::unordered_map<Node, NodeId, NodeHash> index_;
  std::vector<std::string> symbols_;
  std::vector<std::int64_t> symbol_costs_;
  std::unordered_map<std::string, SymbolId> symbol_index_;
};

/// Parses the S-expression surface syntax: `(lam body)`, `$i`, n-ary
/// left-associated application, any other atom a primitive. Debug atoms
/// `#i` (shifted variable), `α<k>` / `#α<k>` (abstraction variable) and
/// `??<k>` (hole) are accepted so printed output reparses.
NodeId parse(ExprStore& store, std::string_view text);

std::string print(const ExprStore& store, NodeId id);

/// Direct recursive evaluation of the cost function, bypassing the cache.
std::int64_t cost(const ExprStore& store, NodeId id, const CostParams& params);
/// Cost with abstraction variables free.
std::int64_t cost_star(const ExprStore& store, NodeId id, const CostParams& params);

/// Syntactic equality of `e1` downshifted by `shift1` and `e2` downshifted by
/// `shift2`, where every free variable of each side is at least its shift.
bool equal_modulo_shift(const ExprStore& store, NodeId e1, std::int32_t shift1, NodeId e2, std::int32_t shift2);

/// Rebuild `e` with every free variable index lowered by `amount`. Every free
/// index must be at least `amount`.
NodeId shift_free(ExprStore& store, NodeId e, std::int32_t amount);

}  // namespace forge
