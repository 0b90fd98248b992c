#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/library.hpp"

namespace forge {

struct ReportAbstraction {
  std::string name;
  std::string body;
  int arity = 0;
  std::int64_t utility = 0;
  std::size_t num_uses = 0;

  bool operator==(const ReportAbstraction&) const = default;
};

struct ReportIteration {
  std::uint64_t nodes_expanded = 0;
  std::uint64_t candidates_scored = 0;
  PruneCounts pruned;
  std::vector<TracePoint> trace;
  bool budget_exhausted = false;
  double seconds = 0.0;
  std::int64_t cost_after = 0;

  bool operator==(const ReportIteration&) const = default;
};

/// Plain-data view of a run; what gets written to disk.
struct Report {
  std::vector<ReportAbstraction> abstractions;
  std::vector<std::string> rewritten;
  std::vector<std::string> tasks;
  std::int64_t original_cost = 0;
  std::int64_t final_cost = 0;
  std::int64_t ratio_numerator = 1;
  std::int64_t ratio_denominator = 1;
  double compression_ratio = 1.0;
  std::vector<ReportIteration> iterations;
  CorpusStats corpus_stats;
  double wall_seconds = 0.0;
  std::optional<std::int64_t> peak_memory_kb;

  bool operator==(const Report&) const;
};

Report make_report(const ExprStore& store, const Corpus& input, const LibraryResult& result);

nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& doc);

/// Peak resident set size of this process, when the platform reports it.
std::optional<std::int64_t> peak_memory_kb();

}  // namespace forge
