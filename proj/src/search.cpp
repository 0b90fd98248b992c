#include "forge/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace forge {

PruneCounts& PruneCounts::operator+=(const PruneCounts& o) {
  zero_match += o.zero_match;
  upper_bound += o.upper_bound;
  dominance += o.dominance;
  arity += o.arity;
  single_location += o.single_location;
  single_task += o.single_task;
  return *this;
}

namespace {

// Tree view over a token prefix, used for printing and materializing.
struct TokenTree {
  struct Item {
    bool hole;
    BodyToken token;
    int left = -1;
    int right = -1;
  };
  std::vector<Item> items;
  int holes = 0;

  explicit TokenTree(const std::vector<BodyToken>& tokens) {
    std::size_t pos = 0;
    build(tokens, pos);
  }

  int build(const std::vector<BodyToken>& tokens, std::size_t& pos) {
    int me = static_cast<int>(items.size());
    if (pos >= tokens.size()) {
      items.push_back({true, {}, -1, -1});
      ++holes;
      return me;
    }
    BodyToken t = tokens[pos++];
    items.push_back({false, t, -1, -1});
    if (t.kind == BodyToken::Kind::App) {
      int l = build(tokens, pos);
      int r = build(tokens, pos);
      items[static_cast<std::size_t>(me)].left = l;
      items[static_cast<std::size_t>(me)].right = r;
    } else if (t.kind == BodyToken::Kind::Lam) {
      int b = build(tokens, pos);
      items[static_cast<std::size_t>(me)].left = b;
    }
    return me;
  }
};

void render(const ExprStore& store, const TokenTree& tree, int at, std::string& out) {
  const auto& item = tree.items[static_cast<std::size_t>(at)];
  if (item.hole) {
    out += "??";
    return;
  }
  switch (item.token.kind) {
    case BodyToken::Kind::Prim: out += store.symbol(static_cast<SymbolId>(item.token.payload)); return;
    case BodyToken::Kind::Var: out += "$" + std::to_string(item.token.payload); return;
    case BodyToken::Kind::AbsVar: out += "α" + std::to_string(item.token.payload); return;
    case BodyToken::Kind::Lam:
      out += "(lam ";
      render(store, tree, item.left, out);
      out += ')';
      return;
    case BodyToken::Kind::App: {
      std::vector<int> args;
      int head = at;
      while (!tree.items[static_cast<std::size_t>(head)].hole &&
             tree.items[static_cast<std::size_t>(head)].token.kind == BodyToken::Kind::App) {
        args.push_back(tree.items[static_cast<std::size_t>(head)].right);
        head = tree.items[static_cast<std::size_t>(head)].left;
      }
      out += '(';
      render(store, tree, head, out);
      for (auto it = args.rbegin(); it != args.rend(); ++it) {
        out += ' ';
        render(store, tree, *it, out);
      }
      out += ')';
      return;
    }
  }
}

void tokens_of(const ExprStore& store, NodeId e, std::vector<BodyToken>& out) {
  const Node& n = store.node(e);
  switch (n.kind) {
    case ExprKind::Lam:
      out.push_back({BodyToken::Kind::Lam, 0});
      tokens_of(store, n.left, out);
      return;
    case ExprKind::App:
      out.push_back({BodyToken::Kind::App, 0});
      tokens_of(store, n.left, out);
      tokens_of(store, n.right, out);
      return;
    case ExprKind::Var: out.push_back({BodyToken::Kind::Var, n.payload}); return;
    case ExprKind::Prim: out.push_back({BodyToken::Kind::Prim, n.payload}); return;
    case ExprKind::AbsVar: out.push_back({BodyToken::Kind::AbsVar, n.payload}); return;
    default: throw std::invalid_argument("unexpected node in abstraction body");
  }
}

}  // namespace

SearchSpace::SearchSpace(const ExprStore& store, const Corpus& corpus, const SearchConfig& config)
    : store_(store),
      config_(config),
      index_(store, corpus),
      prim_cost_(store.params().prim_cost(config.abstraction_name)),
      corpus_cost_(forge::corpus_cost(store, corpus)) {
  if (config.max_arity < 0) throw std::invalid_argument("max_arity must be non-negative");
}

PartialAbstraction SearchSpace::root() const {
  PartialAbstraction p;
  p.hole_depths = {0};
  p.locations.resize(index_.size());
  for (std::uint32_t occ = 0; occ < index_.size(); ++occ) {
    p.locations[occ] = occ;
    p.upper_bound += store_.cost(index_.node(occ));
  }
  p.hole_occs = p.locations;
  return p;
}

PartialAbstraction SearchSpace::make_child(const PartialAbstraction& p, BodyToken token,
                                           const std::vector<std::uint32_t>& keep) const {
  const std::size_t old_holes = p.hole_count();
  const std::size_t old_arity = p.usages.size();
  const std::int32_t depth = p.hole_depths.back();

  PartialAbstraction c;
  c.tokens.reserve(p.tokens.size() + 1);
  c.tokens = p.tokens;
  c.tokens.push_back(token);
  c.hole_depths.assign(p.hole_depths.begin(), p.hole_depths.end() - 1);
  c.usages = p.usages;
  bool fresh = false;
  switch (token.kind) {
    case BodyToken::Kind::App:
      c.hole_depths.push_back(depth);  // argument
      c.hole_depths.push_back(depth);  // function, filled first
      break;
    case BodyToken::Kind::Lam: c.hole_depths.push_back(depth + 1); break;
    case BodyToken::Kind::AbsVar:
      if (static_cast<std::size_t>(token.payload) == old_arity) {
        c.usages.push_back(1);
        fresh = true;
      } else {
        ++c.usages[static_cast<std::size_t>(token.payload)];
      }
      break;
    default: break;
  }

  c.locations.reserve(keep.size());
  c.hole_occs.reserve(keep.size() * c.hole_depths.size());
  c.args.reserve(keep.size() * c.usages.size());
  for (std::uint32_t j : keep) {
    std::uint32_t loc = p.locations[j];
    c.locations.push_back(loc);
    c.upper_bound += store_.cost(index_.node(loc));
    auto holes_begin = p.hole_occs.begin() + static_cast<std::ptrdiff_t>(j * old_holes);
    c.hole_occs.insert(c.hole_occs.end(), holes_begin, holes_begin + static_cast<std::ptrdiff_t>(old_holes - 1));
    std::uint32_t occ = holes_begin[static_cast<std::ptrdiff_t>(old_holes - 1)];
    if (token.kind == BodyToken::Kind::App) {
      c.hole_occs.push_back(index_.second_child(occ));
      c.hole_occs.push_back(index_.first_child(occ));
    } else if (token.kind == BodyToken::Kind::Lam) {
      c.hole_occs.push_back(index_.first_child(occ));
    }
    auto args_begin = p.args.begin() + static_cast<std::ptrdiff_t>(j * old_arity);
    c.args.insert(c.args.end(), args_begin, args_begin + static_cast<std::ptrdiff_t>(old_arity));
    if (fresh) c.args.push_back({occ, depth});
  }
  return c;
}

std::vector<PartialAbstraction> SearchSpace::expansions(const PartialAbstraction& p, PruneCounts* pruned) const {
  std::vector<PartialAbstraction> out;
  if (p.complete()) return out;
  const std::size_t h = p.hole_count() - 1;
  const std::int32_t depth = p.hole_depths.back();
  const std::size_t n = p.locations.size();

  std::vector<std::uint32_t> app_js, lam_js;
  std::map<std::int32_t, std::vector<std::uint32_t>> prim_js, var_js;
  for (std::uint32_t j = 0; j < n; ++j) {
    const Node& e = store_.node(index_.node(p.hole_occ(j, h)));
    switch (e.kind) {
      case ExprKind::App: app_js.push_back(j); break;
      case ExprKind::Lam: lam_js.push_back(j); break;
      case ExprKind::Prim: prim_js[e.payload].push_back(j); break;
      case ExprKind::Var:
        // A variable bound outside the body would be free in the abstraction.
        if (e.payload < depth) var_js[e.payload].push_back(j);
        break;
      default: break;
    }
  }

  if (!app_js.empty()) out.push_back(make_child(p, {BodyToken::Kind::App, 0}, app_js));
  if (!lam_js.empty()) out.push_back(make_child(p, {BodyToken::Kind::Lam, 0}, lam_js));
  for (const auto& [sym, js] : prim_js) out.push_back(make_child(p, {BodyToken::Kind::Prim, sym}, js));
  for (const auto& [i, js] : var_js) out.push_back(make_child(p, {BodyToken::Kind::Var, i}, js));

  std::vector<std::uint32_t> keep;
  for (int k = 0; k < p.arity(); ++k) {
    keep.clear();
    for (std::uint32_t j = 0; j < n; ++j) {
      NodeId e = index_.node(p.hole_occ(j, h));
      if (store_.min_free(e) < depth) continue;
      const ArgSite& first = p.arg(j, static_cast<std::size_t>(k));
      if (equal_modulo_shift(store_, e, depth, index_.node(first.occ), first.depth)) keep.push_back(j);
    }
    if (keep.empty()) {
      if (pruned) ++pruned->zero_match;
      continue;
    }
    out.push_back(make_child(p, {BodyToken::Kind::AbsVar, k}, keep));
  }

  // A bare variable is the identity function, which never compresses.
  if (p.tokens.empty()) return out;
  if (p.arity() < config_.max_arity) {
    keep.clear();
    for (std::uint32_t j = 0; j < n; ++j)
      if (store_.min_free(index_.node(p.hole_occ(j, h))) >= depth) keep.push_back(j);
    if (keep.empty()) {
      if (pruned) ++pruned->zero_match;
    } else {
      out.push_back(make_child(p, {BodyToken::Kind::AbsVar, p.arity()}, keep));
    }
  } else if (pruned) {
    ++pruned->arity;
  }
  return out;
}

bool SearchSpace::has_redundant_argument(const PartialAbstraction& p) const {
  const std::size_t arity = p.usages.size();
  for (std::size_t a = 0; a < arity; ++a) {
    for (std::size_t b = a + 1; b < arity; ++b) {
      bool always_equal = true;
      for (std::size_t j = 0; j < p.locations.size() && always_equal; ++j) {
        const ArgSite& x = p.arg(j, a);
        const ArgSite& y = p.arg(j, b);
        always_equal = equal_modulo_shift(store_, index_.node(x.occ), x.depth, index_.node(y.occ), y.depth);
      }
      if (always_equal) return true;
    }
  }
  return false;
}

bool SearchSpace::has_capturable_argument(const PartialAbstraction& p) const {
  if (p.locations.empty()) return false;
  for (std::size_t k = 0; k < p.usages.size(); ++k) {
    NodeId first = index_.node(p.arg(0, k).occ);
    if (!store_.closed(first)) continue;
    bool same = true;
    for (std::size_t j = 1; j < p.locations.size() && same; ++j) same = index_.node(p.arg(j, k).occ) == first;
    if (same) return true;
  }
  return false;
}

std::int64_t SearchSpace::body_cost_star(const PartialAbstraction& p) const {
  const auto& params = store_.params();
  std::int64_t total = 0;
  for (const auto& t : p.tokens) {
    switch (t.kind) {
      case BodyToken::Kind::Prim: total += store_.symbol_cost(static_cast<SymbolId>(t.payload)); break;
      case BodyToken::Kind::App: total += params.cost_app; break;
      case BodyToken::Kind::Lam: total += params.cost_lam; break;
      case BodyToken::Kind::Var: total += params.cost_var; break;
      case BodyToken::Kind::AbsVar: break;
    }
  }
  return total;
}

std::int64_t SearchSpace::body_cost(const PartialAbstraction& p) const {
  std::int64_t occurrences = 0;
  for (int u : p.usages) occurrences += u;
  return body_cost_star(p) + occurrences * store_.params().cost_absvar;
}

std::string SearchSpace::print(const PartialAbstraction& p) const {
  TokenTree tree(p.tokens);
  std::string out;
  render(store_, tree, 0, out);
  return out;
}

NodeId SearchSpace::to_expr(ExprStore& store, const PartialAbstraction& p) const {
  TokenTree tree(p.tokens);
  int next_hole = 0;
  auto go = [&](auto& self, int at) -> NodeId {
    const auto& item = tree.items[static_cast<std::size_t>(at)];
    if (item.hole) return store.hole(next_hole++);
    switch (item.token.kind) {
      case BodyToken::Kind::Prim: return store.prim(static_cast<SymbolId>(item.token.payload));
      case BodyToken::Kind::Var: return store.var(item.token.payload);
      case BodyToken::Kind::AbsVar: return store.absvar(item.token.payload);
      case BodyToken::Kind::Lam: return store.lam(self(self, item.left));
      case BodyToken::Kind::App: {
        NodeId f = self(self, item.left);
        NodeId x = self(self, item.right);
        return store.app(f, x);
      }
    }
    return NodeId{};
  };
  return go(go, 0);
}

MatchSet SearchSpace::match_set(const PartialAbstraction& p) const {
  const std::int64_t base =
      body_cost_star(p) - prim_cost_ - store_.params().cost_app * static_cast<std::int64_t>(p.usages.size());
  MatchSet ms;
  ms.occs.reserve(p.locations.size());
  ms.local.reserve(p.locations.size());
  ms.arg_occs.reserve(p.locations.size() * p.usages.size());
  std::vector<std::uint32_t> arg_occs(p.usages.size());
  for (std::size_t j = 0; j < p.locations.size(); ++j) {
    std::int64_t local = base;
    for (std::size_t k = 0; k < p.usages.size(); ++k) {
      arg_occs[k] = p.arg(j, k).occ;
      local += (p.usages[k] - 1) * store_.cost(index_.node(arg_occs[k]));
    }
    ms.add(p.locations[j], local, arg_occs);
  }
  return ms;
}

bool SearchSpace::spans_multiple_tasks(std::span<const std::uint32_t> occs) const {
  if (occs.empty()) return false;
  std::uint32_t first = index_.task(occs.front());
  for (std::uint32_t occ : occs)
    if (index_.task(occ) != first) return true;
  return false;
}

// ---------------------------------------------------------------------------

namespace {

struct Candidate {
  bool found = false;
  std::int64_t utility = 0;
  std::int64_t cost = 0;
  std::string printed;
  std::vector<BodyToken> tokens;
  int arity = 0;
};

// Total order: higher utility, then cheaper body, then smaller print.
bool better(const Candidate& a, const Candidate& b) {
  if (!a.found) return false;
  if (!b.found) return true;
  if (a.utility != b.utility) return a.utility > b.utility;
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.printed < b.printed;
}

struct Scorer {
  const SearchSpace& space;
  RewriteDp dp;
  UtilityModel model;

  explicit Scorer(const SearchSpace& s) : space(s), dp(s.index()), model(s.index(), s.config().mode) {}

  /// nullopt when the single-task rule rejects the rewrite set.
  std::optional<std::int64_t> score(const MatchSet& ms, std::int64_t abstraction_cost, std::size_t* uses = nullptr) {
    bool single_task = space.config().opt_single_task_prune;
    DpOutcome o = dp.run(ms, single_task || uses != nullptr);
    if (uses) *uses = o.accepted.size();
    if (single_task && !space.spans_multiple_tasks(o.accepted)) return std::nullopt;
    return model.score(o, abstraction_cost);
  }
};

Candidate arity_zero(const SearchSpace& space, Scorer& scorer) {
  const ExprStore& store = space.store();
  const OccurrenceIndex& index = space.index();
  const bool strict = store.params().leaves_positive();

  std::map<std::uint32_t, std::vector<std::uint32_t>> by_node;
  for (std::uint32_t occ = 0; occ < index.size(); ++occ) {
    NodeId e = index.node(occ);
    if (store.closed(e)) by_node[to_index(e)].push_back(occ);
  }
  struct Entry {
    std::int64_t bound;
    std::uint32_t node;
  };
  std::vector<Entry> entries;
  for (const auto& [node, occs] : by_node) {
    if (occs.size() < 2) continue;
    entries.push_back({store.cost(static_cast<NodeId>(node)) * static_cast<std::int64_t>(occs.size()), node});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.bound > b.bound; });

  Candidate best;
  for (const Entry& entry : entries) {
    if (best.found ? (strict ? entry.bound <= best.utility : entry.bound < best.utility) : entry.bound <= 0) break;
    const auto& occs = by_node[entry.node];
    if (space.config().opt_single_task_prune && !space.spans_multiple_tasks(occs)) continue;
    NodeId body = static_cast<NodeId>(entry.node);
    MatchSet ms;
    std::int64_t local = store.cost(body) - space.abstraction_prim_cost();
    for (std::uint32_t occ : occs) ms.add(occ, local, {});
    auto u = scorer.score(ms, store.cost(body));
    if (!u || *u <= 0) continue;
    Candidate c;
    c.found = true;
    c.utility = *u;
    c.cost = store.cost(body);
    c.printed = print(store, body);
    tokens_of(store, body, c.tokens);
    if (better(c, best)) best = std::move(c);
  }
  return best;
}

class Engine {
 public:
  Engine(const SearchSpace& space, Candidate initial)
      : space_(space),
        config_(space.config()),
        strict_(space.store().params().leaves_positive()),
        start_(std::chrono::steady_clock::now()) {
    if (initial.found) {
      stats_.trace.push_back({0, initial.utility, space.corpus_cost() - initial.utility - initial.cost});
      best_utility_.store(initial.utility);
      best_found_.store(true);
    }
    best_ = std::move(initial);
  }

  void run() {
    push(std::make_unique<PartialAbstraction>(space_.root()));
    int workers = std::max(1, config_.workers);
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> threads;
      for (int i = 0; i < workers; ++i) threads.emplace_back([this] { work(); });
      for (auto& t : threads) t.join();
    }
    stats_.seconds = elapsed();
  }

  const Candidate& best() const { return best_; }
  SearchStats& stats() { return stats_; }

 private:
  struct Entry {
    std::int64_t bound;
    std::uint64_t seq;
    std::unique_ptr<PartialAbstraction> p;
  };
  struct Lower {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.bound != b.bound) return a.bound < b.bound;
      return a.seq > b.seq;
    }
  };

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  // May read a stale best; a stale value is never larger than the current
  // one, so the test only gets more permissive.
  bool can_improve(std::int64_t bound) const {
    if (!best_found_.load(std::memory_order_acquire)) return bound > 0;
    std::int64_t best = best_utility_.load(std::memory_order_acquire);
    return strict_ ? bound > best : bound >= best;
  }

  void push(std::unique_ptr<PartialAbstraction> p) {
    std::int64_t bound = p->upper_bound;
    heap_.push_back({bound, seq_++, std::move(p)});
    std::push_heap(heap_.begin(), heap_.end(), Lower{});
  }

  void offer(Candidate c) {
    std::lock_guard lock(mu_);
    if (!better(c, best_)) return;
    if (!best_.found || c.utility > best_.utility)
      stats_.trace.push_back({stats_.nodes_expanded, c.utility, space_.corpus_cost() - c.utility - c.cost});
    best_ = std::move(c);
    best_utility_.store(best_.utility, std::memory_order_release);
    best_found_.store(true, std::memory_order_release);
  }

  void work() {
    Scorer scorer(space_);
    PruneCounts pruned;
    std::uint64_t scored = 0;
    std::vector<PartialAbstraction> frontier;
    for (;;) {
      std::unique_ptr<PartialAbstraction> p;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || !heap_.empty() || active_ == 0; });
        if (stop_ || heap_.empty()) break;
        if (config_.node_budget && stats_.nodes_expanded >= *config_.node_budget) {
          halt();
          break;
        }
        if (config_.time_budget_s && ++pops_ % 1000 == 0 && elapsed() > *config_.time_budget_s) {
          halt();
          break;
        }
        std::pop_heap(heap_.begin(), heap_.end(), Lower{});
        p = std::move(heap_.back().p);
        heap_.pop_back();
        if (config_.opt_upper_bound && !can_improve(p->upper_bound)) {
          ++stats_.pruned.upper_bound;
          continue;
        }
        ++stats_.nodes_expanded;
        ++active_;
      }

      frontier.clear();
      expand(*p, scorer, pruned, scored, frontier);
      p.reset();

      {
        std::lock_guard lock(mu_);
        for (auto& child : frontier) push(std::make_unique<PartialAbstraction>(std::move(child)));
        stats_.pruned += pruned;
        stats_.candidates_scored += scored;
        pruned = {};
        scored = 0;
        --active_;
      }
      cv_.notify_all();
    }
    std::lock_guard lock(mu_);
    stats_.pruned += pruned;
    stats_.candidates_scored += scored;
  }

  void halt() {
    stop_ = true;
    stats_.budget_exhausted = true;
    cv_.notify_all();
  }

  void expand(const PartialAbstraction& p, Scorer& scorer, PruneCounts& pruned, std::uint64_t& scored,
              std::vector<PartialAbstraction>& frontier) {
    const ExprStore& store = space_.store();
    for (auto& child : space_.expansions(p, &pruned)) {
      if (config_.opt_upper_bound && !can_improve(child.upper_bound)) {
        ++pruned.upper_bound;
        continue;
      }
      if ((config_.opt_redundant_args && space_.has_redundant_argument(child)) ||
          (config_.opt_arg_capture && space_.has_capturable_argument(child))) {
        ++pruned.dominance;
        continue;
      }
      // A closed single match is covered by the arity-zero abstraction of
      // that subtree once every argument has been captured.
      if (config_.opt_arg_capture && child.locations.size() == 1 &&
          store.closed(space_.index().node(child.locations.front()))) {
        ++pruned.single_location;
        continue;
      }
      if (config_.opt_single_task_prune && !space_.spans_multiple_tasks(child.locations)) {
        ++pruned.single_task;
        continue;
      }
      if (!child.complete()) {
        frontier.push_back(std::move(child));
        continue;
      }
      std::int64_t cost = space_.body_cost(child);
      ++scored;
      auto u = scorer.score(space_.match_set(child), cost);
      if (!u) {
        ++pruned.single_task;
        continue;
      }
      if (*u <= 0) continue;
      if (best_found_.load(std::memory_order_acquire) && *u < best_utility_.load(std::memory_order_acquire)) continue;
      Candidate c;
      c.found = true;
      c.utility = *u;
      c.cost = cost;
      c.printed = space_.print(child);
      c.tokens = child.tokens;
      c.arity = child.arity();
      offer(std::move(c));
    }
  }

  const SearchSpace& space_;
  const SearchConfig& config_;
  const bool strict_;
  const std::chrono::steady_clock::time_point start_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<Entry> heap_;
  std::uint64_t seq_ = 0;
  std::uint64_t pops_ = 0;
  int active_ = 0;
  bool stop_ = false;
  Candidate best_;
  std::atomic<std::int64_t> best_utility_{0};
  std::atomic<bool> best_found_{false};
  SearchStats stats_;
};

NodeId build_body(ExprStore& store, const std::vector<BodyToken>& tokens) {
  std::size_t pos = 0;
  auto go = [&](auto& self) -> NodeId {
    const BodyToken t = tokens.at(pos++);
    switch (t.kind) {
      case BodyToken::Kind::Prim: return store.prim(static_cast<SymbolId>(t.payload));
      case BodyToken::Kind::Var: return store.var(t.payload);
      case BodyToken::Kind::AbsVar: return store.absvar(t.payload);
      case BodyToken::Kind::Lam: return store.lam(self(self));
      case BodyToken::Kind::App: {
        NodeId f = self(self);
        NodeId x = self(self);
        return store.app(f, x);
      }
    }
    return NodeId{};
  };
  return go(go);
}

}  // namespace

ArityZeroResult best_arity_zero(const ExprStore& store, const Corpus& corpus, const SearchConfig& config) {
  SearchSpace space(store, corpus, config);
  Scorer scorer(space);
  Candidate c = arity_zero(space, scorer);
  ArityZeroResult out;
  if (!c.found) return out;
  out.found = true;
  out.utility = c.utility;
  // Closed subtrees are already in the store; recover the id from the print.
  for (std::uint32_t occ = 0; occ < space.index().size(); ++occ) {
    NodeId e = space.index().node(occ);
    if (store.closed(e) && print(store, e) == c.printed) {
      out.body = e;
      break;
    }
  }
  return out;
}

SearchResult cts_search(ExprStore& store, const Corpus& corpus, const SearchConfig& config) {
  SearchResult result;
  if (corpus.empty()) return result;
  Candidate best;
  SearchStats stats;
  {
    SearchSpace space(store, corpus, config);
    Scorer scorer(space);
    Engine engine(space, arity_zero(space, scorer));
    engine.run();
    best = engine.best();
    stats = std::move(engine.stats());
  }
  result.stats = std::move(stats);
  if (!best.found) return result;
  result.found = true;
  result.body = build_body(store, best.tokens);
  result.arity = best.arity;
  result.utility = best.utility;
  result.cost = best.cost;
  result.printed = best.printed;
  result.num_uses = rewrite_corpus(store, corpus, Abstraction::make(store, config.abstraction_name, result.body)).num_uses;
  return result;
}

}  // namespace forge
