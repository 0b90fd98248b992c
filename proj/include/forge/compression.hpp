#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forge/config.hpp"
#include "forge/corpus.hpp"
#include "forge/occurrence_index.hpp"

namespace forge {

/// A learned function: `body` mentions `AbsVar(0..arity-1)` and no holes.
struct Abstraction {
  std::string name;
  NodeId body;
  int arity = 0;

  static Abstraction make(const ExprStore& store, std::string name, NodeId body);
};

/// Where an abstraction variable's argument sits: the occurrence of the
/// subtree it binds and how many lambdas of the abstraction body enclose it.
/// The argument passed at the call site is that subtree with its free
/// variables lowered by `depth`.
struct ArgSite {
  std::uint32_t occ;
  std::int32_t depth;
};

/// Matches a complete abstraction body at one occurrence. Returns one site
/// per abstraction variable (its first occurrence in pre-order), or nullopt
/// when unification fails or an argument would refer to a lambda inside the
/// abstraction.
std::optional<std::vector<ArgSite>> match_at(const OccurrenceIndex& index, NodeId body, int arity, std::uint32_t occ);

/// Per-location gain of rewriting with `a`: body size, minus the call
/// overhead, plus the savings from passing a multiply-used argument once.
std::int64_t local_utility(const ExprStore& store, const Abstraction& a, std::span<const NodeId> args);

/// Candidate rewrite locations of one abstraction, sorted by occurrence.
struct MatchSet {
  std::vector<std::uint32_t> occs;
  std::vector<std::int64_t> local;
  std::vector<std::uint32_t> arg_begin{0};
  std::vector<std::uint32_t> arg_occs;

  void add(std::uint32_t occ, std::int64_t local_gain, std::span<const std::uint32_t> args);
  std::size_t size() const { return occs.size(); }
  std::span<const std::uint32_t> args(std::size_t i) const {
    return {arg_occs.data() + arg_begin[i], arg_occs.data() + arg_begin[i + 1]};
  }
};

struct DpOutcome {
  /// (program, best gain at its root) for every program with positive gain.
  std::vector<std::pair<std::uint32_t, std::int64_t>> program_gain;
  std::int64_t total_gain = 0;
  /// Accepted rewrite locations in top-down order; filled on request.
  std::vector<std::uint32_t> accepted;
};

/// Bottom-up accept/reject dynamic program over occurrences:
///   reject[e] = Σ best[child], accept[e] = local(e) + Σ best[arg],
///   best[e] = max(reject[e], accept[e]).
/// Only matched occurrences and their ancestors are visited; everything else
/// has zero gain. Scratch space is reused across runs, so one instance must
/// not be shared between threads.
class RewriteDp {
 public:
  explicit RewriteDp(const OccurrenceIndex& index);

  DpOutcome run(const MatchSet& matches, bool extract_accepted);

  /// Same recurrence evaluated at every occurrence; tables stay readable
  /// through the accessors until the next run.
  DpOutcome run_dense(const MatchSet& matches);

  std::int64_t reject_gain(std::uint32_t occ) const { return reject_[occ]; }
  std::int64_t accept_gain(std::uint32_t occ) const { return accept_[occ]; }
  std::int64_t best_gain(std::uint32_t occ) const { return best_[occ]; }

 private:
  void evaluate(const MatchSet& matches, std::span<const std::uint32_t> order_desc);
  std::vector<std::uint32_t> extract(const MatchSet& matches, std::span<const std::uint32_t> roots);
  void reset();

  const OccurrenceIndex& index_;
  std::vector<std::int64_t> reject_;
  std::vector<std::int64_t> accept_;
  std::vector<std::int64_t> best_;
  std::vector<std::int32_t> slot_;
  std::vector<std::uint8_t> mark_;
  std::vector<std::uint32_t> touched_;
};

/// Turns per-program gains into a utility under the configured metric.
class UtilityModel {
 public:
  UtilityModel(const OccurrenceIndex& index, UtilityMode mode);

  std::int64_t score(const DpOutcome& outcome, std::int64_t abstraction_cost) const;
  UtilityMode mode() const { return mode_; }

 private:
  const OccurrenceIndex& index_;
  UtilityMode mode_;
  std::vector<std::int64_t> task_min_cost_;
};

struct RewritePlan {
  std::vector<std::int64_t> util_reject;
  std::vector<std::int64_t> util_accept;
  std::vector<std::int64_t> util_best;
  std::vector<std::uint32_t> accepted;
};

struct RewriteResult {
  Corpus corpus;
  /// Per-program metric: -cost(A) + Σ best gain at each root.
  std::int64_t utility = 0;
  std::size_t num_uses = 0;
  RewritePlan plan;
  std::vector<std::uint32_t> accepted_programs;
};

/// Finds every match of `a`, chooses the optimal non-conflicting subset and
/// rewrites each program, replacing accepted matches by `(name arg0 ...)`.
RewriteResult rewrite_corpus(ExprStore& store, const Corpus& corpus, const Abstraction& a);

/// Utility under `config.mode`.
std::int64_t utility(ExprStore& store, const Abstraction& a, const Corpus& corpus, const SearchConfig& config);

/// Literal min-over-tasks metric: Σ_task min cost(p) minus
/// (cost(A) + Σ_task min cost(rewritten p)), over program-aligned corpora.
std::int64_t min_task_utility(const ExprStore& store, const Corpus& before, const Corpus& after, std::int64_t abstraction_cost);

struct Ratio {
  std::int64_t numerator = 1;
  std::int64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  /// Two-decimal rendering.
  std::string str() const;
};

Ratio compression_ratio(const ExprStore& store, const Corpus& before, const Corpus& after);

/// Replaces every saturated call `(name a0 .. a_{k-1})` by the abstraction
/// body instantiated with its arguments. Undoes `rewrite_corpus`.
NodeId inline_abstractions(ExprStore& store, NodeId e, const std::vector<Abstraction>& library);

}  // namespace forge
