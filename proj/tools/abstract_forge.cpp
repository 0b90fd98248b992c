// Command-line front end: compress, trace, ablation and generate.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "forge/generator.hpp"
#include "forge/library.hpp"
#include "forge/report.hpp"

namespace {

using namespace forge;
using nlohmann::json;

constexpr int kParseError = 1;
constexpr int kConfigError = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string output;
  std::string trace_path;
  int iterations = 1;
  int max_arity = 3;
  int threads = 0;  // 0: environment or 1
  std::string utility = "sum";
  bool no_upper_bound = false;
  bool no_arg_capture = false;
  bool no_redundant_args = false;
  bool no_single_task = false;
  std::optional<std::uint64_t> node_budget;
  std::optional<double> time_budget;
  bool quiet = false;
};

void add_search_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("input", o.input, "Corpus JSON file")->required();
  cmd->add_option("--max-arity", o.max_arity, "Maximum abstraction arity");
  cmd->add_option("--threads", o.threads, "Search worker threads (env ABSTRACT_FORGE_THREADS)");
  cmd->add_option("--utility", o.utility, "Utility metric: sum or min-task");
  cmd->add_flag("--no-opt-upper-bound", o.no_upper_bound, "Disable upper-bound pruning");
  cmd->add_flag("--no-opt-arg-capture", o.no_arg_capture, "Disable argument-capture pruning");
  cmd->add_flag("--no-opt-redundant-args", o.no_redundant_args, "Disable redundant-argument pruning");
  cmd->add_flag("--no-opt-single-task", o.no_single_task, "Disable the single-task prune");
  cmd->add_option("--node-budget", o.node_budget, "Stop each search after this many expansions");
  cmd->add_option("--time-budget", o.time_budget, "Stop each search after this many seconds");
  cmd->add_option("--output", o.output, "Write the JSON result here");
  cmd->add_flag("--quiet", o.quiet, "Suppress the summary");
}

int resolve_threads(int flag) {
  if (flag != 0) return flag;
  if (const char* env = std::getenv("ABSTRACT_FORGE_THREADS")) {
    try {
      std::size_t used = 0;
      int n = std::stoi(env, &used);
      if (used == std::string(env).size()) return n;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("ABSTRACT_FORGE_THREADS is not an integer: ") + env);
  }
  return 1;
}

SearchConfig search_config(const Options& o) {
  SearchConfig c;
  if (o.iterations < 0) throw ConfigError("--iterations must be >= 0");
  if (o.max_arity < 0) throw ConfigError("--max-arity must be >= 0");
  c.max_arity = o.max_arity;
  c.workers = resolve_threads(o.threads);
  if (c.workers < 1) throw ConfigError("--threads must be >= 1");
  if (o.utility == "sum") {
    c.mode = UtilityMode::Sum;
  } else if (o.utility == "min-task") {
    c.mode = UtilityMode::MinTask;
  } else {
    throw ConfigError("--utility must be sum or min-task");
  }
  c.opt_upper_bound = !o.no_upper_bound;
  c.opt_arg_capture = !o.no_arg_capture;
  c.opt_redundant_args = !o.no_redundant_args;
  c.opt_single_task_prune = !o.no_single_task;
  if (o.time_budget && *o.time_budget <= 0) throw ConfigError("--time-budget must be positive");
  c.node_budget = o.node_budget;
  c.time_budget_s = o.time_budget;
  return c;
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed2(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << x;
  return s.str();
}

int run_compress(const Options& o) {
  SearchConfig config = search_config(o);
  ExprStore store;
  Corpus corpus = load_corpus(store, o.input);
  auto t0 = std::chrono::steady_clock::now();
  LibraryResult result = compress_iterated(store, corpus, o.iterations, config);
  Report report = make_report(store, corpus, result);
  report.wall_seconds = seconds_since(t0);
  report.peak_memory_kb = peak_memory_kb();

  if (!o.quiet) {
    std::int64_t cost = result.original_cost;
    for (std::size_t i = 0; i < result.iterations.size(); ++i) {
      const auto& it = result.iterations[i];
      cost = it.cost_after;
      std::cout << it.abstraction.name << "  arity " << it.abstraction.arity << "  utility " << it.utility
                << "  uses " << it.num_uses << "  ratio "
                << fixed2(static_cast<double>(result.original_cost) / static_cast<double>(cost)) << "\n    "
                << print(store, it.abstraction.body) << '\n';
    }
    std::cout << "cost " << result.original_cost << " -> " << result.final_cost << "  ratio " << result.ratio.str()
              << "  " << fixed2(report.wall_seconds) << "s\n";
  }
  for (const auto& it : report.iterations)
    if (it.budget_exhausted) std::cerr << "warning: search budget exhausted; result may be suboptimal\n";
  if (!o.output.empty()) write_json(o.output, to_json(report));
  return 0;
}

int run_trace(const Options& o) {
  SearchConfig config = search_config(o);
  ExprStore store;
  Corpus corpus = load_corpus(store, o.input);
  SearchResult r = cts_search(store, corpus, config);
  std::int64_t original = corpus_cost(store, corpus);
  json points = json::array();
  for (const auto& t : r.stats.trace)
    points.push_back({{"nodes_expanded", t.nodes_expanded},
                      {"utility", t.utility},
                      {"compression_ratio", static_cast<double>(original) / static_cast<double>(t.rewritten_cost)}});
  json doc = {{"trace", points},
              {"total_nodes_expanded", r.stats.nodes_expanded},
              {"budget_exhausted", r.stats.budget_exhausted},
              {"best", r.found ? json(r.printed) : json(nullptr)},
              {"utility", r.utility}};
  std::string path = !o.trace_path.empty() ? o.trace_path : o.output;
  if (!path.empty()) write_json(path, doc);
  if (!o.quiet) {
    for (const auto& p : points)
      std::cout << p["nodes_expanded"] << '\t' << p["utility"] << '\t'
                << fixed2(p["compression_ratio"].get<double>()) << '\n';
    std::cout << "total nodes " << r.stats.nodes_expanded << '\n';
  }
  return 0;
}

int run_ablation(const Options& o) {
  SearchConfig base = search_config(o);
  struct Cell {
    std::string name;
    SearchConfig config;
  };
  std::vector<Cell> cells;
  cells.push_back({"baseline", base});
  SearchConfig c = base;
  c.opt_arg_capture = false;
  cells.push_back({"no-arg-capture", c});
  c = base;
  c.opt_upper_bound = false;
  cells.push_back({"no-upper-bound", c});
  c = base;
  c.opt_redundant_args = false;
  cells.push_back({"no-redundant-args", c});
  c = base;
  c.opt_arg_capture = c.opt_upper_bound = c.opt_redundant_args = false;
  cells.push_back({"no-opt", c});

  ExprStore store;
  Corpus corpus = load_corpus(store, o.input);
  json rows = json::array();
  std::uint64_t baseline_nodes = 0;
  for (const auto& cell : cells) {
    SearchResult r = cts_search(store, corpus, cell.config);
    if (cell.name == "baseline") baseline_nodes = std::max<std::uint64_t>(1, r.stats.nodes_expanded);
    double ratio = static_cast<double>(r.stats.nodes_expanded) / static_cast<double>(baseline_nodes);
    rows.push_back({{"config", cell.name},
                    {"nodes_expanded", r.stats.nodes_expanded},
                    {"node_ratio", ratio},
                    {"utility", r.utility},
                    {"seconds", r.stats.seconds},
                    {"budget_exhausted", r.stats.budget_exhausted}});
    if (!o.quiet)
      std::cout << std::left << std::setw(20) << cell.name << std::setw(12) << r.stats.nodes_expanded
                << (r.stats.budget_exhausted ? std::string("budget") : fixed2(ratio)) << "  utility " << r.utility
                << '\n';
  }
  if (!o.output.empty()) write_json(o.output, {{"rows", rows}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learns reusable functions that compress a corpus of lambda-calculus programs."};
  app.require_subcommand(1);

  Options o;
  auto* compress = app.add_subcommand("compress", "Learn a library by iterated compression");
  add_search_flags(compress, o);
  compress->add_option("--iterations", o.iterations, "Number of abstractions to learn");

  auto* trace = app.add_subcommand("trace", "Record best-so-far improvements of one search");
  add_search_flags(trace, o);
  trace->add_option("--trace", o.trace_path, "Write the trace JSON here");

  auto* ablation = app.add_subcommand("ablation", "Compare search effort with optimizations disabled");
  add_search_flags(ablation, o);

  GeneratorParams gen;
  std::string gen_output;
  auto* generate = app.add_subcommand("generate", "Write a synthetic hierarchical corpus");
  generate->add_option("--programs", gen.programs, "Number of programs");
  generate->add_option("--mean-length", gen.mean_length, "Target mean terminals per program");
  generate->add_option("--nesting", gen.nesting, "Levels of hidden helpers");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--tasks", gen.tasks, "Number of tasks (0: one per program)");
  generate->add_option("--output", gen_output, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*compress) return run_compress(o);
    if (*trace) return run_trace(o);
    if (*ablation) return run_ablation(o);
    if (*generate) {
      if (gen.mean_length <= 0) throw ConfigError("--mean-length must be positive");
      ExprStore store;
      json doc = corpus_to_json(store, generate_corpus(store, gen));
      if (gen_output.empty()) {
        std::cout << doc.dump(2) << '\n';
      } else {
        write_json(gen_output, doc);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParseError;
  }
  return 0;
}
