#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/expr.hpp"

namespace forge {

struct Program {
  NodeId root;
  std::string task;
};

/// A list of closed programs whose nodes live in a shared ExprStore.
struct Corpus {
  std::vector<Program> programs;

  std::size_t size() const { return programs.size(); }
  bool empty() const { return programs.empty(); }
  /// Number of distinct task names.
  std::size_t task_count() const;
};

/// Closed and built only from Lam, App, Var and Prim.
bool is_program(const ExprStore& store, NodeId root);

/// Adds a program, naming its task `prog_<index>` when `task` is empty.
/// Throws std::invalid_argument if `root` is not a program.
void add_program(const ExprStore& store, Corpus& corpus, NodeId root, std::string task = {});

/// Reads either a bare array of S-expressions or
/// `{"programs": [{"body": "...", "task": "..."}]}`.
Corpus corpus_from_json(ExprStore& store, const nlohmann::json& doc);
Corpus load_corpus(ExprStore& store, const std::string& path);
nlohmann::json corpus_to_json(const ExprStore& store, const Corpus& corpus);

std::int64_t corpus_cost(const ExprStore& store, const Corpus& corpus);

struct CorpusStats {
  std::size_t count = 0;
  double mean_length = 0.0;
  double mean_depth = 0.0;
};

CorpusStats corpus_stats(const ExprStore& store, const Corpus& corpus);

struct SubtreeRef {
  std::uint32_t program;
  NodeId node;

  bool operator==(const SubtreeRef&) const = default;
};

/// Every subtree occurrence of every program, programs in order and each
/// program in pre-order (function before argument).
std::vector<SubtreeRef> subtrees(const ExprStore& store, const Corpus& corpus);

}  // namespace forge
