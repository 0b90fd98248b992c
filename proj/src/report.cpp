#include "forge/report.hpp"

#include <sys/resource.h>

namespace forge {

using nlohmann::json;

bool Report::operator==(const Report& o) const {
  return abstractions == o.abstractions && rewritten == o.rewritten && tasks == o.tasks &&
         original_cost == o.original_cost && final_cost == o.final_cost && ratio_numerator == o.ratio_numerator &&
         ratio_denominator == o.ratio_denominator && compression_ratio == o.compression_ratio &&
         iterations == o.iterations && corpus_stats.count == o.corpus_stats.count &&
         corpus_stats.mean_length == o.corpus_stats.mean_length && corpus_stats.mean_depth == o.corpus_stats.mean_depth &&
         wall_seconds == o.wall_seconds && peak_memory_kb == o.peak_memory_kb;
}

Report make_report(const ExprStore& store, const Corpus& input, const LibraryResult& result) {
  Report r;
  for (const auto& it : result.iterations) {
    r.abstractions.push_back(
        {it.abstraction.name, print(store, it.abstraction.body), it.abstraction.arity, it.utility, it.num_uses});
    const SearchStats& s = it.stats;
    r.iterations.push_back(
        {s.nodes_expanded, s.candidates_scored, s.pruned, s.trace, s.budget_exhausted, s.seconds, it.cost_after});
  }
  if (result.final_search) {
    const SearchStats& s = *result.final_search;
    r.iterations.push_back(
        {s.nodes_expanded, s.candidates_scored, s.pruned, s.trace, s.budget_exhausted, s.seconds, result.final_cost});
  }
  for (const auto& p : result.rewritten.programs) {
    r.rewritten.push_back(print(store, p.root));
    r.tasks.push_back(p.task);
  }
  r.original_cost = result.original_cost;
  r.final_cost = result.final_cost;
  r.ratio_numerator = result.ratio.numerator;
  r.ratio_denominator = result.ratio.denominator;
  r.compression_ratio = result.ratio.value();
  r.corpus_stats = corpus_stats(store, input);
  return r;
}

namespace {

json prune_json(const PruneCounts& p) {
  return {{"zero_match", p.zero_match},           {"upper_bound", p.upper_bound}, {"dominance", p.dominance},
          {"arity", p.arity},                     {"single_location", p.single_location},
          {"single_task", p.single_task}};
}

PruneCounts prune_from(const json& j) {
  PruneCounts p;
  p.zero_match = j.at("zero_match");
  p.upper_bound = j.at("upper_bound");
  p.dominance = j.at("dominance");
  p.arity = j.at("arity");
  p.single_location = j.at("single_location");
  p.single_task = j.at("single_task");
  return p;
}

}  // namespace

json to_json(const Report& r) {
  json doc;
  doc["abstractions"] = json::array();
  for (const auto& a : r.abstractions)
    doc["abstractions"].push_back(
        {{"name", a.name}, {"body", a.body}, {"arity", a.arity}, {"utility", a.utility}, {"num_uses", a.num_uses}});
  doc["rewritten"] = r.rewritten;
  doc["tasks"] = r.tasks;
  doc["original_cost"] = r.original_cost;
  doc["final_cost"] = r.final_cost;
  doc["compression_ratio"] = r.compression_ratio;
  doc["compression_ratio_exact"] = {r.ratio_numerator, r.ratio_denominator};
  json iterations = json::array();
  for (const auto& it : r.iterations) {
    json trace = json::array();
    for (const auto& t : it.trace) trace.push_back({t.nodes_expanded, t.utility, t.rewritten_cost});
    iterations.push_back({{"nodes_expanded", it.nodes_expanded},
                          {"candidates_scored", it.candidates_scored},
                          {"pruned", prune_json(it.pruned)},
                          {"trace", trace},
                          {"budget_exhausted", it.budget_exhausted},
                          {"seconds", it.seconds},
                          {"cost_after", it.cost_after}});
  }
  doc["stats"] = {{"iterations", iterations},
                  {"wall_seconds", r.wall_seconds},
                  {"peak_memory_kb", r.peak_memory_kb ? json(*r.peak_memory_kb) : json(nullptr)}};
  doc["corpus_stats"] = {{"count", r.corpus_stats.count},
                         {"mean_length", r.corpus_stats.mean_length},
                         {"mean_depth", r.corpus_stats.mean_depth}};
  return doc;
}

Report report_from_json(const json& doc) {
  Report r;
  for (const auto& a : doc.at("abstractions"))
    r.abstractions.push_back({a.at("name"), a.at("body"), a.at("arity"), a.at("utility"), a.at("num_uses")});
  r.rewritten = doc.at("rewritten").get<std::vector<std::string>>();
  r.tasks = doc.at("tasks").get<std::vector<std::string>>();
  r.original_cost = doc.at("original_cost");
  r.final_cost = doc.at("final_cost");
  r.compression_ratio = doc.at("compression_ratio");
  r.ratio_numerator = doc.at("compression_ratio_exact").at(0);
  r.ratio_denominator = doc.at("compression_ratio_exact").at(1);
  const json& stats = doc.at("stats");
  for (const auto& it : stats.at("iterations")) {
    ReportIteration ri;
    ri.nodes_expanded = it.at("nodes_expanded");
    ri.candidates_scored = it.at("candidates_scored");
    ri.pruned = prune_from(it.at("pruned"));
    for (const auto& t : it.at("trace")) ri.trace.push_back({t.at(0), t.at(1), t.at(2)});
    ri.budget_exhausted = it.at("budget_exhausted");
    ri.seconds = it.at("seconds");
    ri.cost_after = it.at("cost_after");
    r.iterations.push_back(std::move(ri));
  }
  r.wall_seconds = stats.at("wall_seconds");
  if (!stats.at("peak_memory_kb").is_null()) r.peak_memory_kb = stats.at("peak_memory_kb").get<std::int64_t>();
  const json& cs = doc.at("corpus_stats");
  r.corpus_stats.count = cs.at("count");
  r.corpus_stats.mean_length = cs.at("mean_length");
  r.corpus_stats.mean_depth = cs.at("mean_depth");
  return r;
}

std::optional<std::int64_t> peak_memory_kb() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  return static_cast<std::int64_t>(usage.ru_maxrss);
}

}  // namespace forge
