#pragma once

#include <cstdint>
#include <vector>

#include "forge/compression.hpp"
#include "forge/search.hpp"

namespace forge {

struct Iteration {
  Abstraction abstraction;
  std::int64_t utility = 0;
  std::size_t num_uses = 0;
  std::int64_t cost_after = 0;  // corpus cost after this rewrite
  SearchStats stats;
};

struct LibraryResult {
  std::vector<Iteration> iterations;
  Corpus rewritten;
  std::int64_t original_cost = 0;
  std::int64_t final_cost = 0;
  Ratio ratio;
  /// Stats of the search that found nothing worth adding, if the loop
  /// stopped early.
  std::optional<SearchStats> final_search;

  std::vector<Abstraction> abstractions() const;
};

/// Learns up to `iterations` abstractions one at a time, rewriting the corpus
/// after each. Later abstractions may call earlier ones. Stops as soon as the
/// best candidate has utility <= 0.
LibraryResult compress_iterated(ExprStore& store, const Corpus& corpus, int iterations, const SearchConfig& config);

}  // namespace forge
