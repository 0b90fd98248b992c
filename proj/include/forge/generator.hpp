#pragma once

#include <cstdint>

#include "forge/corpus.hpp"

namespace forge {

struct GeneratorParams {
  std::size_t programs = 50;
  double mean_length = 30.0;  // target terminals per program
  int nesting = 2;            // levels of hidden helper functions
  std::uint64_t seed = 1;
  std::size_t tasks = 0;      // 0: one task per program
};

/// Programs built by composing a hidden library of helper templates, where
/// each level calls the level below. Deterministic for a given seed.
Corpus generate_corpus(ExprStore& store, const GeneratorParams& params);

}  // namespace forge
