#pragma once

#include <cstdint>
#include <vector>

#include "forge/corpus.hpp"

namespace forge {

/// Flat table of every subtree occurrence in a corpus. Occurrences are
/// numbered in the order `subtrees()` yields them, so within a program a
/// parent always precedes its descendants and the left child of an
/// application sits at `occ + 1`.
class OccurrenceIndex {
 public:
  static constexpr std::uint32_t kNone = UINT32_MAX;

  OccurrenceIndex(const ExprStore& store, const Corpus& corpus);

  std::uint32_t size() const { return static_cast<std::uint32_t>(node_.size()); }
  NodeId node(std::uint32_t occ) const { return node_[occ]; }
  std::uint32_t parent(std::uint32_t occ) const { return parent_[occ]; }
  std::uint32_t program(std::uint32_t occ) const { return program_[occ]; }
  std::uint32_t task(std::uint32_t occ) const { return program_task_[program_[occ]]; }
  std::uint32_t program_task(std::uint32_t program) const { return program_task_[program]; }
  std::uint32_t root(std::uint32_t program) const { return roots_[program]; }
  std::uint32_t program_count() const { return static_cast<std::uint32_t>(roots_.size()); }
  std::uint32_t task_count() const { return task_count_; }

  /// Lambda body or application function.
  std::uint32_t first_child(std::uint32_t occ) const { return occ + 1; }
  /// Application argument.
  std::uint32_t second_child(std::uint32_t occ) const { return occ + 1 + store_.tree_size(node_[occ + 1]); }

  const ExprStore& store() const { return store_; }

 private:
  const ExprStore& store_;
  std::vector<NodeId> node_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> program_;
  std::vector<std::uint32_t> roots_;
  std::vector<std::uint32_t> program_task_;
  std::uint32_t task_count_ = 0;
};

}  // namespace forge
