#include "forge/corpus.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace forge {

std::size_t Corpus::task_count() const {
  std::set<std::string_view> tasks;
  for (const auto& p : programs) tasks.insert(p.task);
  return tasks.size();
}

bool is_program(const ExprStore& store, NodeId root) { return store.is_pure(root) && store.closed(root); }

void add_program(const ExprStore& store, Corpus& corpus, NodeId root, std::string task) {
  if (!is_program(store, root))
    throw std::invalid_argument("not a closed program: " + print(store, root));
  if (task.empty()) task = "prog_" + std::to_string(corpus.programs.size());
  corpus.programs.push_back({root, std::move(task)});
}

Corpus corpus_from_json(ExprStore& store, const nlohmann::json& doc) {
  Corpus corpus;
  auto add_text = [&](const nlohmann::json& body, std::string task) {
    if (!body.is_string()) throw ParseError("program body must be a string");
    NodeId root = parse(store, body.get<std::string>());
    if (!is_program(store, root)) throw ParseError("program is not closed: " + body.get<std::string>());
    add_program(store, corpus, root, std::move(task));
  };
  if (doc.is_array()) {
    for (const auto& item : doc) add_text(item, {});
  } else if (doc.is_object() && doc.contains("programs") && doc["programs"].is_array()) {
    for (const auto& item : doc["programs"]) {
      if (item.is_string()) {
        add_text(item, {});
        continue;
      }
      if (!item.is_object() || !item.contains("body")) throw ParseError("program entry needs a \"body\" field");
      std::string task = item.contains("task") ? item["task"].get<std::string>() : std::string{};
      add_text(item["body"], std::move(task));
    }
  } else {
    throw ParseError("corpus must be an array of programs or an object with a \"programs\" array");
  }
  return corpus;
}

Corpus load_corpus(ExprStore& store, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return corpus_from_json(store, doc);
}

nlohmann::json corpus_to_json(const ExprStore& store, const Corpus& corpus) {
  nlohmann::json programs = nlohmann::json::array();
  for (const auto& p : corpus.programs) programs.push_back({{"body", print(store, p.root)}, {"task", p.task}});
  return {{"programs", programs}};
}

std::int64_t corpus_cost(const ExprStore& store, const Corpus& corpus) {
  std::int64_t total = 0;
  for (const auto& p : corpus.programs) total += store.cost(p.root);
  return total;
}

CorpusStats corpus_stats(const ExprStore& store, const Corpus& corpus) {
  CorpusStats stats;
  stats.count = corpus.size();
  if (corpus.empty()) return stats;
  double length = 0, depth = 0;
  for (const auto& p : corpus.programs) {
    length += store.terminals(p.root);
    depth += store.depth(p.root);
  }
  stats.mean_length = length / static_cast<double>(corpus.size());
  stats.mean_depth = depth / static_cast<double>(corpus.size());
  return stats;
}

std::vector<SubtreeRef> subtrees(const ExprStore& store, const Corpus& corpus) {
  std::vector<SubtreeRef> out;
  std::vector<NodeId> stack;
  for (std::uint32_t p = 0; p < corpus.programs.size(); ++p) {
    stack.push_back(corpus.programs[p].root);
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      out.push_back({p, id});
      const Node& n = store.node(id);
      if (n.kind == ExprKind::App) {
        stack.push_back(n.right);
        stack.push_back(n.left);
      } else if (n.kind == ExprKind::Lam) {
        stack.push_back(n.left);
      }
    }
  }
  return out;
}

}  // namespace forge
