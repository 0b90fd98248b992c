#include "forge/library.hpp"

#include <stdexcept>
#include <string>

namespace forge {

std::vector<Abstraction> LibraryResult::abstractions() const {
  std::vector<Abstraction> out;
  out.reserve(iterations.size());
  for (const auto& it : iterations) out.push_back(it.abstraction);
  return out;
}

namespace {

std::string fresh_name(const ExprStore& store, int& counter) {
  for (;;) {
    std::string name = "fn_" + std::to_string(counter++);
    if (!store.find_symbol(name)) return name;
  }
}

}  // namespace

LibraryResult compress_iterated(ExprStore& store, const Corpus& corpus, int iterations, const SearchConfig& config) {
  if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  LibraryResult result;
  result.rewritten = corpus;
  result.original_cost = corpus_cost(store, corpus);
  result.final_cost = result.original_cost;
  int counter = 0;
  for (int i = 0; i < iterations; ++i) {
    SearchConfig cfg = config;
    cfg.abstraction_name = fresh_name(store, counter);
    SearchResult found = cts_search(store, result.rewritten, cfg);
    if (!found.found || found.utility <= 0) {
      result.final_search = std::move(found.stats);
      break;
    }
    Abstraction a = Abstraction::make(store, cfg.abstraction_name, found.body);
    RewriteResult rw = rewrite_corpus(store, result.rewritten, a);
    result.rewritten = std::move(rw.corpus);
    result.final_cost = corpus_cost(store, result.rewritten);
    result.iterations.push_back({a, found.utility, rw.num_uses, result.final_cost, std::move(found.stats)});
  }
  result.ratio = compression_ratio(store, corpus, result.rewritten);
  return result;
}

}  // namespace forge
