#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forge/compression.hpp"
#include "forge/config.hpp"
#include "forge/corpus.hpp"
#include "forge/occurrence_index.hpp"

namespace forge {

/// One production in a pre-order encoding of an abstraction body.
struct BodyToken {
  enum class Kind : std::uint8_t { Prim, App, Lam, Var, AbsVar };
  Kind kind;
  std::int32_t payload = 0;  // symbol id, de Bruijn index or variable id

  bool operator==(const BodyToken&) const = default;
};

/// A body with holes plus every place in the corpus it matches.
///
/// Holes are always filled leftmost-first, so the body is a pre-order prefix
/// (`tokens`) followed by the open holes. `hole_depths` is a stack whose back
/// is the next hole to fill; each entry is the number of body lambdas above
/// that hole. For match location `j`:
///   - `hole_occ(j, h)` is the occurrence the h-th open hole is bound to,
///   - `arg(j, k)` is where abstraction variable k first binds.
/// The hole binding in unification terms is that subtree downshifted by the
/// hole depth, which may produce shifted variables.
struct PartialAbstraction {
  std::vector<BodyToken> tokens;
  std::vector<std::int32_t> hole_depths;
  std::vector<std::int32_t> usages;
  std::vector<std::uint32_t> locations;
  std::vector<std::uint32_t> hole_occs;
  std::vector<ArgSite> args;
  std::int64_t upper_bound = 0;

  int arity() const { return static_cast<int>(usages.size()); }
  bool complete() const { return hole_depths.empty(); }
  std::size_t hole_count() const { return hole_depths.size(); }
  std::uint32_t hole_occ(std::size_t j, std::size_t h) const { return hole_occs[j * hole_count() + h]; }
  const ArgSite& arg(std::size_t j, std::size_t k) const { return args[j * usages.size() + k]; }
};

struct PruneCounts {
  std::uint64_t zero_match = 0;
  std::uint64_t upper_bound = 0;
  std::uint64_t dominance = 0;
  std::uint64_t arity = 0;
  std::uint64_t single_location = 0;
  std::uint64_t single_task = 0;

  PruneCounts& operator+=(const PruneCounts& o);
  bool operator==(const PruneCounts&) const = default;
};

struct TracePoint {
  std::uint64_t nodes_expanded;
  std::int64_t utility;
  std::int64_t rewritten_cost;  // corpus cost after rewriting with the best so far

  bool operator==(const TracePoint&) const = default;
};

struct SearchStats {
  std::uint64_t nodes_expanded = 0;
  std::uint64_t candidates_scored = 0;
  PruneCounts pruned;
  std::vector<TracePoint> trace;
  bool budget_exhausted = false;
  double seconds = 0.0;
};

struct SearchResult {
  bool found = false;  // false: nothing beats leaving the corpus unchanged
  NodeId body{};
  int arity = 0;
  std::int64_t utility = 0;
  std::int64_t cost = 0;
  std::size_t num_uses = 0;
  std::string printed;
  SearchStats stats;
};

/// The search space of one corpus: the occurrence table, cost model and the
/// expansion / pruning primitives used by the branch-and-bound loop.
class SearchSpace {
 public:
  SearchSpace(const ExprStore& store, const Corpus& corpus, const SearchConfig& config);

  const OccurrenceIndex& index() const { return index_; }
  const ExprStore& store() const { return store_; }
  const SearchConfig& config() const { return config_; }

  /// `??` matching every subtree occurrence.
  PartialAbstraction root() const;

  /// Every single-step expansion of the next hole of `p` that keeps at least
  /// one match location. Children reuse the parent's match list; the corpus
  /// is never rescanned. `pruned` (optional) receives zero-match and arity
  /// counts.
  std::vector<PartialAbstraction> expansions(const PartialAbstraction& p, PruneCounts* pruned = nullptr) const;

  static std::int64_t upper_bound(const PartialAbstraction& p) { return p.upper_bound; }

  /// Two abstraction variables bind the same argument at every location.
  bool has_redundant_argument(const PartialAbstraction& p) const;
  /// Some abstraction variable binds the same closed argument everywhere.
  bool has_capturable_argument(const PartialAbstraction& p) const;
  bool strictly_dominated(const PartialAbstraction& p) const {
    return has_redundant_argument(p) || has_capturable_argument(p);
  }

  /// Cost of the body with abstraction variables at cost 0 / at full cost.
  std::int64_t body_cost_star(const PartialAbstraction& p) const;
  std::int64_t body_cost(const PartialAbstraction& p) const;
  /// Pre-order rendering; open holes print as `??`.
  std::string print(const PartialAbstraction& p) const;
  /// Materializes the body (holes become `??0, ??1, ...` in pre-order).
  NodeId to_expr(ExprStore& store, const PartialAbstraction& p) const;

  /// Candidate rewrite set of a complete abstraction.
  MatchSet match_set(const PartialAbstraction& p) const;

  std::int64_t abstraction_prim_cost() const { return prim_cost_; }
  std::int64_t corpus_cost() const { return corpus_cost_; }
  /// Occurrences come from at least two distinct tasks.
  bool spans_multiple_tasks(std::span<const std::uint32_t> occs) const;

 private:
  PartialAbstraction make_child(const PartialAbstraction& p, BodyToken token, const std::vector<std::uint32_t>& keep) const;

  const ExprStore& store_;
  SearchConfig config_;
  OccurrenceIndex index_;
  std::int64_t prim_cost_;
  std::int64_t corpus_cost_;
};

/// Best closed subtree used as a zero-argument abstraction.
struct ArityZeroResult {
  bool found = false;
  NodeId body{};
  std::int64_t utility = 0;
};

ArityZeroResult best_arity_zero(const ExprStore& store, const Corpus& corpus, const SearchConfig& config);

/// Branch-and-bound search for the utility-optimal abstraction. The body of
/// the result is inserted into `store` after the search finishes.
SearchResult cts_search(ExprStore& store, const Corpus& corpus, const SearchConfig& config);

}  // namespace forge
