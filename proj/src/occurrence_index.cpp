#include "forge/occurrence_index.hpp"

#include <map>

namespace forge {

OccurrenceIndex::OccurrenceIndex(const ExprStore& store, const Corpus& corpus) : store_(store) {
  std::map<std::string, std::uint32_t> task_ids;
  std::vector<std::pair<NodeId, std::uint32_t>> stack;
  for (std::uint32_t p = 0; p < corpus.programs.size(); ++p) {
    const auto& prog = corpus.programs[p];
    auto [it, inserted] = task_ids.emplace(prog.task, static_cast<std::uint32_t>(task_ids.size()));
    program_task_.push_back(it->second);
    roots_.push_back(size());
    stack.emplace_back(prog.root, kNone);
    while (!stack.empty()) {
      auto [id, parent] = stack.back();
      stack.pop_back();
      auto occ = size();
      node_.push_back(id);
      parent_.push_back(parent);
      program_.push_back(p);
      const Node& n = store.node(id);
      if (n.kind == ExprKind::App) {
        stack.emplace_back(n.right, occ);
        stack.emplace_back(n.left, occ);
      } else if (n.kind == ExprKind::Lam) {
        stack.emplace_back(n.left, occ);
      }
    }
  }
  task_count_ = static_cast<std::uint32_t>(task_ids.size());
}

}  // namespace forge
