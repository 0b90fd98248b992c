#include "forge/generator.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge {
namespace {

struct Template {
  enum class Kind { Call, Const, Slot, Lam, Var, Use };
  Kind kind;
  int value = 0;  // symbol index, slot id, variable index or helper id
  std::vector<Template> children;
};

struct Helper {
  Template body;
  int slots = 0;
  int terminals = 0;
};

constexpr int kFunctions = 10;
constexpr int kConstants = 8;
constexpr int kFunctionArity[kFunctions] = {2, 2, 2, 1, 1, 3, 2, 1, 2, 2};

class Generator {
 public:
  Generator(ExprStore& store, const GeneratorParams& params) : store_(store), params_(params), rng_(params.seed) {
    for (int level = 0; level < std::max(1, params.nesting); ++level) {
      int count = 4 + static_cast<int>(below(3));
      std::size_t first = helpers_.size();
      for (int i = 0; i < count; ++i) helpers_.push_back(make_helper(level));
      levels_.push_back({first, helpers_.size()});
    }
  }

  NodeId program(double target) {
    int body_depth = 1;
    return store_.lam(fill(target, body_depth));
  }

  std::uint64_t below(std::uint64_t n) { return rng_() % n; }
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

 private:
  Template leaf(int lam_depth, int& slots) {
    std::uint64_t r = below(10);
    if (r < 4 && slots < 3) return {Template::Kind::Slot, slots++, {}};
    if (r < 6 && lam_depth > 0) return {Template::Kind::Var, static_cast<int>(below(static_cast<std::uint64_t>(lam_depth))), {}};
    return {Template::Kind::Const, static_cast<int>(below(kConstants)), {}};
  }

  Template shape(int level, int height, int lam_depth, int& slots) {
    if (height == 0) return leaf(lam_depth, slots);
    std::uint64_t r = below(10);
    if (level > 0 && r < 4) {
      auto [lo, hi] = levels_[static_cast<std::size_t>(level - 1)];
      int id = static_cast<int>(lo + below(hi - lo));
      Template use{Template::Kind::Use, id, {}};
      for (int k = 0; k < helpers_[static_cast<std::size_t>(id)].slots; ++k)
        use.children.push_back(shape(level, height - 1, lam_depth, slots));
      return use;
    }
    if (r == 4 && lam_depth < 2) {
      Template lam{Template::Kind::Lam, 0, {}};
      lam.children.push_back(shape(level, height - 1, lam_depth + 1, slots));
      // Map-style: the lambda is passed to a higher-order primitive.
      Template call{Template::Kind::Call, 0, {}};
      call.children.push_back(std::move(lam));
      call.children.push_back(leaf(lam_depth, slots));
      return call;
    }
    int f = 1 + static_cast<int>(below(kFunctions - 1));
    Template call{Template::Kind::Call, f, {}};
    for (int k = 0; k < kFunctionArity[f]; ++k)
      call.children.push_back(below(3) == 0 ? leaf(lam_depth, slots) : shape(level, height - 1, lam_depth, slots));
    return call;
  }

  int count_terminals(const Template& t) const {
    switch (t.kind) {
      case Template::Kind::Const:
      case Template::Kind::Var: return 1;
      case Template::Kind::Slot: return 0;
      case Template::Kind::Call: {
        int n = 1;
        for (const auto& c : t.children) n += count_terminals(c);
        return n;
      }
      case Template::Kind::Lam: return count_terminals(t.children[0]);
      case Template::Kind::Use: {
        int n = helpers_[static_cast<std::size_t>(t.value)].terminals;
        for (const auto& c : t.children) n += count_terminals(c);
        return n;
      }
    }
    return 0;
  }

  Helper make_helper(int level) {
    for (;;) {
      int slots = 0;
      Template body = shape(level, 2 + static_cast<int>(below(2)), 0, slots);
      if (body.kind == Template::Kind::Slot || body.kind == Template::Kind::Const) continue;
      Helper h{std::move(body), slots, 0};
      h.terminals = count_terminals(h.body);
      if (h.terminals >= 2) return h;
    }
  }

  // Instantiates `t` under `depth` program lambdas; slot fillers come from
  // `args`, generated at the depth of the call site and shifted on use.
  NodeId instantiate(const Template& t, int depth, int local_depth, const std::vector<std::pair<double, int>>& budgets,
                     std::vector<NodeId>& args) {
    switch (t.kind) {
      case Template::Kind::Const: return store_.prim("c" + std::to_string(t.value));
      case Template::Kind::Var: return store_.var(t.value);
      case Template::Kind::Slot: {
        NodeId a = args[static_cast<std::size_t>(t.value)];
        return lift(a, local_depth);
      }
      case Template::Kind::Lam:
        return store_.lam(instantiate(t.children[0], depth + 1, local_depth + 1, budgets, args));
      case Template::Kind::Call: {
        std::vector<NodeId> xs;
        for (const auto& c : t.children) xs.push_back(instantiate(c, depth, local_depth, budgets, args));
        return store_.apply(store_.prim("f" + std::to_string(t.value)), xs);
      }
      case Template::Kind::Use: {
        const Helper& h = helpers_[static_cast<std::size_t>(t.value)];
        std::vector<NodeId> inner;
        for (const auto& c : t.children) inner.push_back(instantiate(c, depth, local_depth, budgets, args));
        return instantiate(h.body, depth, local_depth, budgets, inner);
      }
    }
    throw std::logic_error("bad template");
  }

  // Raises free variables of a closed-over argument past `amount` binders.
  NodeId lift(NodeId e, int amount, int cutoff = 0) {
    if (amount == 0 || store_.closed(e)) return e;
    const Node n = store_.node(e);
    switch (n.kind) {
      case ExprKind::Var: return n.payload >= cutoff ? store_.var(n.payload + amount) : e;
      case ExprKind::Lam: return store_.lam(lift(n.left, amount, cutoff + 1));
      case ExprKind::App: return store_.app(lift(n.left, amount, cutoff), lift(n.right, amount, cutoff));
      default: return e;
    }
  }

  NodeId fill(double budget, int depth) {
    if (budget < 3.0) {
      if (below(3) == 0) return store_.var(static_cast<int>(below(static_cast<std::uint64_t>(depth))));
      return store_.prim("c" + std::to_string(below(kConstants)));
    }
    // Pick a helper from a random level, preferring the top one.
    std::size_t level = levels_.size() - 1;
    while (level > 0 && below(3) == 0) --level;
    auto [lo, hi] = levels_[level];
    const Helper& h = helpers_[lo + below(hi - lo)];
    double rest = budget - h.terminals;
    std::vector<NodeId> args;
    for (int k = 0; k < h.slots; ++k) {
      double share = h.slots > 0 ? rest / h.slots : 0.0;
      args.push_back(fill(std::max(0.0, share * (0.5 + unit())), depth));
    }
    if (h.slots == 0 && rest >= 3.0) {
      // Nothing to nest into: combine with another piece.
      NodeId a = instantiate(h.body, depth, 0, {}, args);
      return store_.apply(store_.prim("f0"), {a, fill(rest, depth)});
    }
    return instantiate(h.body, depth, 0, {}, args);
  }

  ExprStore& store_;
  const GeneratorParams& params_;
  std::mt19937_64 rng_;
  std::vector<Helper> helpers_;
  std::vector<std::pair<std::size_t, std::size_t>> levels_;
};

}  // namespace

namespace {

Corpus generate_scaled(ExprStore& store, const GeneratorParams& params, double scale) {
  Generator gen(store, params);
  Corpus corpus;
  for (std::size_t i = 0; i < params.programs; ++i) {
    double target = scale * params.mean_length * (0.5 + gen.unit());
    NodeId p = gen.program(target);
    std::string task = params.tasks > 0 ? "task_" + std::to_string(i % params.tasks) : std::string{};
    add_program(store, corpus, p, task);
  }
  return corpus;
}

}  // namespace

Corpus generate_corpus(ExprStore& store, const GeneratorParams& params) {
  if (params.mean_length <= 0) throw std::invalid_argument("mean_length must be positive");
  // Helpers overshoot small budgets, so rescale the per-program target until
  // the measured mean lands near the request.
  double scale = 1.0;
  for (int round = 0; round < 6 && params.programs > 0; ++round) {
    ExprStore scratch;
    double mean = corpus_stats(scratch, generate_scaled(scratch, params, scale)).mean_length;
    double error = params.mean_length / mean;
    if (std::abs(error - 1.0) < 0.02) break;
    scale *= error;
  }
  return generate_scaled(store, params, scale);
}

}  // namespace forge
