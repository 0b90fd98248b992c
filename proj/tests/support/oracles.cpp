#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "forge/unify.hpp"
#include "random_exprs.hpp"

namespace forge::testing {

std::int64_t direct_cost(const ExprStore& store, NodeId e) {
  const CostParams& p = store.params();
  const Node& n = store.node(e);
  switch (n.kind) {
    case ExprKind::Lam: return p.cost_lam + direct_cost(store, n.left);
    case ExprKind::App: return p.cost_app + direct_cost(store, n.left) + direct_cost(store, n.right);
    case ExprKind::Var:
    case ExprKind::ShiftedVar: return p.cost_var;
    case ExprKind::Prim: return p.prim_cost(store.symbol(static_cast<SymbolId>(n.payload)));
    case ExprKind::AbsVar: return p.cost_absvar;
    case ExprKind::Hole: return 0;
  }
  return 0;
}

std::int64_t direct_corpus_cost(const ExprStore& store, const Corpus& corpus) {
  std::int64_t total = 0;
  for (const auto& p : corpus.programs) total += direct_cost(store, p.root);
  return total;
}

std::vector<Occurrence> enumerate_occurrences(const ExprStore& store, const Corpus& corpus) {
  std::vector<Occurrence> out;
  std::function<std::uint32_t(std::uint32_t, NodeId)> walk = [&](std::uint32_t prog, NodeId e) {
    auto me = static_cast<std::uint32_t>(out.size());
    out.push_back({prog, e, {}});
    const Node& n = store.node(e);
    if (n.kind == ExprKind::Lam) {
      std::uint32_t c = walk(prog, n.left);
      out[me].children.push_back(c);
    } else if (n.kind == ExprKind::App) {
      std::uint32_t f = walk(prog, n.left);
      std::uint32_t x = walk(prog, n.right);
      out[me].children = {f, x};
    }
    return me;
  };
  for (std::uint32_t i = 0; i < corpus.size(); ++i) walk(i, corpus.programs[i].root);
  return out;
}

namespace {

// Lowers every free variable of `e` by `amount`; nullopt if one would go
// negative.
std::optional<NodeId> lower(ExprStore& store, NodeId e, int amount, int cutoff = 0) {
  const Node n = store.node(e);
  switch (n.kind) {
    case ExprKind::Var:
      if (n.payload < cutoff) return e;
      if (n.payload - amount < cutoff) return std::nullopt;
      return store.var(n.payload - amount);
    case ExprKind::Lam: {
      auto b = lower(store, n.left, amount, cutoff + 1);
      if (!b) return std::nullopt;
      return store.lam(*b);
    }
    case ExprKind::App: {
      auto f = lower(store, n.left, amount, cutoff);
      auto x = lower(store, n.right, amount, cutoff);
      if (!f || !x) return std::nullopt;
      return store.app(*f, *x);
    }
    default: return e;
  }
}

struct Materializer {
  ExprStore& store;
  const std::vector<Occurrence>& occs;
  const Abstraction& a;
  NodeId name;
  std::vector<char> chosen;
  std::vector<char> used;

  // Rewritten copy of occurrence `o`.
  NodeId emit(std::uint32_t o) {
    if (chosen[o]) {
      used[o] = 1;
      std::vector<std::optional<NodeId>> args(static_cast<std::size_t>(a.arity));
      bind(a.body, o, 0, args);
      std::vector<NodeId> xs;
      for (auto& x : args) xs.push_back(*x);
      return store.apply(name, xs);
    }
    const Node n = store.node(occs[o].node);
    if (n.kind == ExprKind::Lam) return store.lam(emit(occs[o].children[0]));
    if (n.kind == ExprKind::App) {
      NodeId f = emit(occs[o].children[0]);
      NodeId x = emit(occs[o].children[1]);
      return store.app(f, x);
    }
    return occs[o].node;
  }

  // Walks the body against occurrence `o`; arguments come from the first
  // occurrence of each variable, everything else is consumed by the call.
  void bind(NodeId pattern, std::uint32_t o, int depth, std::vector<std::optional<NodeId>>& args) {
    const Node p = store.node(pattern);
    if (p.kind == ExprKind::AbsVar) {
      auto& slot = args[static_cast<std::size_t>(p.payload)];
      if (!slot) {
        auto lowered = lower(store, emit(o), depth);
        if (!lowered) throw std::logic_error("argument refers to a lambda inside the body");
        slot = *lowered;
      }
      return;
    }
    if (p.kind == ExprKind::Lam) {
      bind(p.left, occs[o].children[0], depth + 1, args);
    } else if (p.kind == ExprKind::App) {
      bind(p.left, occs[o].children[0], depth, args);
      bind(p.right, occs[o].children[1], depth, args);
    }
  }
};

}  // namespace

std::int64_t best_subset_gain(ExprStore& store, const Corpus& corpus, const Abstraction& a,
                              const std::vector<std::uint32_t>& occs) {
  if (occs.size() > 20) throw std::invalid_argument("too many locations for the subset oracle");
  std::vector<Occurrence> table = enumerate_occurrences(store, corpus);
  std::vector<std::uint32_t> roots;
  for (std::uint32_t o = 0; o < table.size(); ++o)
    if (o == 0 || table[o].program != table[o - 1].program) roots.push_back(o);
  Materializer m{store, table, a, store.prim(a.name), {}, {}};
  const std::int64_t before = direct_corpus_cost(store, corpus);
  std::int64_t best = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << occs.size()); ++mask) {
    m.chosen.assign(table.size(), 0);
    m.used.assign(table.size(), 0);
    for (std::size_t i = 0; i < occs.size(); ++i)
      if (mask >> i & 1) m.chosen[occs[i]] = 1;
    std::int64_t after = 0;
    for (std::uint32_t r : roots) after += direct_cost(store, m.emit(r));
    bool all_used = true;
    for (std::size_t i = 0; i < occs.size(); ++i)
      if ((mask >> i & 1) && !m.used[occs[i]]) all_used = false;
    if (all_used) best = std::max(best, before - after);
  }
  return best;
}

std::vector<std::uint32_t> naive_matches(ExprStore& store, const Corpus& corpus, NodeId body) {
  std::vector<Occurrence> table = enumerate_occurrences(store, corpus);
  std::vector<std::uint32_t> out;
  for (std::uint32_t o = 0; o < table.size(); ++o) {
    auto l = lambda_unify(store, body, table[o].node);
    if (l && valid_match(store, *l)) out.push_back(o);
  }
  return out;
}

namespace {

struct Site {
  NodeId lowered;  // argument with its free variables moved to the call site
};

// Every way of keeping or abstracting each position of `e`; `sites` lists
// the abstracted positions in pre-order.
void shapes(ExprStore& store, NodeId e, int depth, std::vector<std::pair<NodeId, std::vector<Site>>>& out,
            std::size_t limit) {
  const Node n = store.node(e);
  std::vector<std::pair<NodeId, std::vector<Site>>> mine;
  // Abstract this position.
  if (auto lowered = lower(store, e, depth)) mine.push_back({store.hole(0), {{*lowered}}});
  switch (n.kind) {
    case ExprKind::Var:
      if (n.payload < depth) mine.push_back({e, {}});
      break;
    case ExprKind::Prim: mine.push_back({e, {}}); break;
    case ExprKind::Lam: {
      std::vector<std::pair<NodeId, std::vector<Site>>> inner;
      shapes(store, n.left, depth + 1, inner, limit);
      for (auto& [b, s] : inner) mine.push_back({store.lam(b), std::move(s)});
      break;
    }
    case ExprKind::App: {
      std::vector<std::pair<NodeId, std::vector<Site>>> fs, xs;
      shapes(store, n.left, depth, fs, limit);
      shapes(store, n.right, depth, xs, limit);
      for (auto& [fb, fsites] : fs)
        for (auto& [xb, xsites] : xs) {
          if (fsites.size() + xsites.size() > limit) continue;
          std::vector<Site> s = fsites;
          s.insert(s.end(), xsites.begin(), xsites.end());
          mine.push_back({store.app(fb, xb), std::move(s)});
        }
      break;
    }
    default: break;
  }
  for (auto& m : mine) out.push_back(std::move(m));
}

// Replaces the placeholder holes of `shape`, in pre-order, by variables.
NodeId assign(ExprStore& store, NodeId shape, const std::vector<int>& classes, std::size_t& next) {
  const Node n = store.node(shape);
  switch (n.kind) {
    case ExprKind::Hole: return store.absvar(classes[next++]);
    case ExprKind::Lam: return store.lam(assign(store, n.left, classes, next));
    case ExprKind::App: {
      NodeId f = assign(store, n.left, classes, next);
      NodeId x = assign(store, n.right, classes, next);
      return store.app(f, x);
    }
    default: return shape;
  }
}

}  // namespace

NaiveResult naive_best(ExprStore& store, const Corpus& corpus, const SearchConfig& config) {
  std::vector<Occurrence> table = enumerate_occurrences(store, corpus);
  std::set<NodeId> bodies;
  const auto max_arity = static_cast<std::size_t>(config.max_arity);
  for (const auto& occ : table) {
    std::vector<std::pair<NodeId, std::vector<Site>>> all;
    shapes(store, occ.node, 0, all, 8);
    for (const auto& [shape, sites] : all) {
      // Partitions of the sites into variables numbered by first use; sites
      // in one class must carry the same argument here.
      std::vector<int> classes(sites.size());
      std::vector<NodeId> reps;
      std::function<void(std::size_t)> rgs = [&](std::size_t i) {
        if (i == sites.size()) {
          std::size_t next = 0;
          bodies.insert(assign(store, shape, classes, next));
          return;
        }
        for (std::size_t c = 0; c < reps.size(); ++c) {
          if (reps[c] != sites[i].lowered) continue;
          classes[i] = static_cast<int>(c);
          rgs(i + 1);
        }
        if (reps.size() < max_arity) {
          classes[i] = static_cast<int>(reps.size());
          reps.push_back(sites[i].lowered);
          rgs(i + 1);
          reps.pop_back();
        }
      };
      rgs(0);
    }
  }

  std::vector<std::string> task_of;
  for (const auto& p : corpus.programs) task_of.push_back(p.task);

  NaiveResult best;
  for (NodeId body : bodies) {
    if (store.has_hole(body) || store.kind(body) == ExprKind::AbsVar) continue;
    std::vector<std::uint32_t> matches;
    std::vector<Mapping> maps;
    for (std::uint32_t o = 0; o < table.size(); ++o) {
      auto l = lambda_unify(store, body, table[o].node);
      if (l && valid_match(store, *l)) {
        matches.push_back(o);
        maps.push_back(*l);
      }
    }
    if (matches.empty()) continue;
    ++best.candidates;
    int arity = 0;
    for (const auto& [k, v] : maps.front())
      if (k.kind == Binder::Kind::AbsVar) arity = std::max(arity, k.id + 1);
    bool excluded = false;
    for (int x = 0; x < arity && !excluded; ++x) {
      NodeId first = *maps.front().find(Binder::absvar(x));
      bool same = store.closed(first);
      for (const auto& m : maps) same = same && *m.find(Binder::absvar(x)) == first;
      if (same && config.opt_arg_capture) excluded = true;
      for (int y = x + 1; y < arity && !excluded; ++y) {
        bool equal = true;
        for (const auto& m : maps) equal = equal && *m.find(Binder::absvar(x)) == *m.find(Binder::absvar(y));
        if (equal && config.opt_redundant_args) excluded = true;
      }
    }
    if (excluded) continue;
    Abstraction a = Abstraction::make(store, config.abstraction_name, body);
    RewriteResult rw = rewrite_corpus(store, corpus, a);
    std::int64_t u = direct_corpus_cost(store, corpus) - direct_corpus_cost(store, rw.corpus) - direct_cost(store, body);
    if (config.opt_single_task_prune) {
      std::set<std::string> tasks;
      for (std::uint32_t p : rw.accepted_programs) tasks.insert(task_of[p]);
      if (tasks.size() < 2) continue;
    }
    std::string printed = print(store, body);
    if (u > best.utility || (u == best.utility && u > 0 && best.body && printed < *best.body)) {
      best.utility = u;
      best.body = printed;
    }
  }
  return best;
}

std::optional<RandomCase> random_case(ExprStore& store, std::mt19937_64& rng, int programs, int max_nodes) {
  Corpus c = random_corpus(store, rng, programs, max_nodes, 3);
  auto subs = subtrees(store, c);
  NodeId at = subs[below(rng, subs.size())].node;
  auto body = random_abstraction(store, rng, at, 3);
  if (!body || store.has_hole(*body)) return std::nullopt;
  return RandomCase{c, Abstraction::make(store, "fn_0", *body)};
}

}  // namespace forge::testing
