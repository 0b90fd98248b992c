#include "forge/compression.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>

#include "forge/unify.hpp"

namespace forge {

namespace {

void collect_absvars(const ExprStore& store, NodeId e, std::vector<int>& usages) {
  if (!store.has_absvar(e)) return;
  const Node& n = store.node(e);
  switch (n.kind) {
    case ExprKind::Lam: collect_absvars(store, n.left, usages); break;
    case ExprKind::App:
      collect_absvars(store, n.left, usages);
      collect_absvars(store, n.right, usages);
      break;
    case ExprKind::AbsVar:
      if (static_cast<std::size_t>(n.payload) >= usages.size()) usages.resize(static_cast<std::size_t>(n.payload) + 1, 0);
      ++usages[static_cast<std::size_t>(n.payload)];
      break;
    default: break;
  }
}

struct Shape {
  std::int64_t cost_star;
  std::int64_t call_overhead;
  std::vector<int> usages;

  Shape(const ExprStore& store, const Abstraction& a) {
    collect_absvars(store, a.body, usages);
    usages.resize(static_cast<std::size_t>(a.arity), 0);
    const auto& p = store.params();
    cost_star = forge::cost_star(store, a.body, p);
    call_overhead = p.prim_cost(a.name) + p.cost_app * a.arity;
  }

  std::int64_t local(const ExprStore& store, std::span<const NodeId> args) const {
    std::int64_t gain = cost_star - call_overhead;
    for (std::size_t k = 0; k < args.size(); ++k) gain += (usages[k] - 1) * store.cost(args[k]);
    return gain;
  }
};

bool match_rec(const OccurrenceIndex& index, NodeId pat, std::uint32_t occ, std::int32_t depth,
               std::vector<std::optional<ArgSite>>& sites) {
  const ExprStore& store = index.store();
  NodeId e = index.node(occ);
  if (store.is_pure(pat)) return pat == e;
  const Node& p = store.node(pat);
  switch (p.kind) {
    case ExprKind::AbsVar: {
      if (store.min_free(e) < depth) return false;
      auto& site = sites[static_cast<std::size_t>(p.payload)];
      if (!site) {
        site = ArgSite{occ, depth};
        return true;
      }
      return equal_modulo_shift(store, e, depth, index.node(site->occ), site->depth);
    }
    case ExprKind::App:
      return store.kind(e) == ExprKind::App && match_rec(index, p.left, index.first_child(occ), depth, sites) &&
             match_rec(index, p.right, index.second_child(occ), depth, sites);
    case ExprKind::Lam:
      return store.kind(e) == ExprKind::Lam && match_rec(index, p.left, index.first_child(occ), depth + 1, sites);
    default: return false;
  }
}

}  // namespace

Abstraction Abstraction::make(const ExprStore& store, std::string name, NodeId body) {
  if (store.has_hole(body) || store.has_shifted(body))
    throw std::invalid_argument("abstraction body must be hole-free: " + print(store, body));
  if (!store.closed(body)) throw std::invalid_argument("abstraction body has a free variable: " + print(store, body));
  if (store.kind(body) == ExprKind::AbsVar)
    throw std::invalid_argument("abstraction body cannot be a bare variable");
  std::vector<int> usages;
  collect_absvars(store, body, usages);
  for (std::size_t k = 0; k < usages.size(); ++k)
    if (usages[k] == 0) throw std::invalid_argument("abstraction variable ids must be dense: " + print(store, body));
  return Abstraction{std::move(name), body, static_cast<int>(usages.size())};
}

std::optional<std::vector<ArgSite>> match_at(const OccurrenceIndex& index, NodeId body, int arity, std::uint32_t occ) {
  std::vector<std::optional<ArgSite>> sites(static_cast<std::size_t>(arity));
  if (!match_rec(index, body, occ, 0, sites)) return std::nullopt;
  std::vector<ArgSite> out;
  out.reserve(sites.size());
  for (const auto& s : sites) {
    if (!s) throw std::logic_error("abstraction variable missing from body");
    out.push_back(*s);
  }
  return out;
}

std::int64_t local_utility(const ExprStore& store, const Abstraction& a, std::span<const NodeId> args) {
  return Shape(store, a).local(store, args);
}

void MatchSet::add(std::uint32_t occ, std::int64_t local_gain, std::span<const std::uint32_t> args) {
  if (!occs.empty() && occs.back() >= occ) throw std::logic_error("MatchSet occurrences must be ascending");
  occs.push_back(occ);
  local.push_back(local_gain);
  arg_occs.insert(arg_occs.end(), args.begin(), args.end());
  arg_begin.push_back(static_cast<std::uint32_t>(arg_occs.size()));
}

// ---------------------------------------------------------------------------

RewriteDp::RewriteDp(const OccurrenceIndex& index)
    : index_(index),
      reject_(index.size(), 0),
      accept_(index.size(), 0),
      best_(index.size(), 0),
      slot_(index.size(), -1),
      mark_(index.size(), 0) {}

void RewriteDp::reset() {
  for (std::uint32_t x : touched_) {
    reject_[x] = accept_[x] = best_[x] = 0;
    slot_[x] = -1;
    mark_[x] = 0;
  }
  touched_.clear();
}

void RewriteDp::evaluate(const MatchSet& matches, std::span<const std::uint32_t> order_desc) {
  for (std::uint32_t x : order_desc) {
    std::int64_t accept = 0;
    if (std::int32_t s = slot_[x]; s >= 0) {
      accept = matches.local[static_cast<std::size_t>(s)];
      for (std::uint32_t arg : matches.args(static_cast<std::size_t>(s))) accept += best_[arg];
    }
    accept_[x] = accept;
    best_[x] = std::max(reject_[x], accept);
    if (std::uint32_t p = index_.parent(x); p != OccurrenceIndex::kNone) reject_[p] += best_[x];
  }
}

std::vector<std::uint32_t> RewriteDp::extract(const MatchSet& matches, std::span<const std::uint32_t> roots) {
  const ExprStore& store = index_.store();
  std::vector<std::uint32_t> accepted;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t root : roots) {
    stack.push_back(root);
    while (!stack.empty()) {
      std::uint32_t x = stack.back();
      stack.pop_back();
      if (best_[x] == 0 && slot_[x] < 0) continue;
      // Ties go to the outer rewrite when it pays for itself.
      std::int32_t s = slot_[x];
      if (s >= 0 && (accept_[x] > reject_[x] ||
                     (accept_[x] == reject_[x] && matches.local[static_cast<std::size_t>(s)] > 0))) {
        accepted.push_back(x);
        auto args = matches.args(static_cast<std::size_t>(s));
        for (auto it = args.rbegin(); it != args.rend(); ++it)
          if (mark_[*it]) stack.push_back(*it);
        continue;
      }
      ExprKind k = store.kind(index_.node(x));
      if (k == ExprKind::App) {
        if (std::uint32_t c = index_.second_child(x); mark_[c]) stack.push_back(c);
        if (std::uint32_t c = index_.first_child(x); mark_[c]) stack.push_back(c);
      } else if (k == ExprKind::Lam) {
        if (std::uint32_t c = index_.first_child(x); mark_[c]) stack.push_back(c);
      }
    }
  }
  return accepted;
}

DpOutcome RewriteDp::run(const MatchSet& matches, bool extract_accepted) {
  reset();
  for (std::size_t i = 0; i < matches.size(); ++i) {
    std::uint32_t occ = matches.occs[i];
    slot_[occ] = static_cast<std::int32_t>(i);
    for (std::uint32_t x = occ; x != OccurrenceIndex::kNone && !mark_[x]; x = index_.parent(x)) {
      mark_[x] = 1;
      touched_.push_back(x);
    }
  }
  std::sort(touched_.begin(), touched_.end(), std::greater<>());
  evaluate(matches, touched_);

  DpOutcome out;
  std::vector<std::uint32_t> roots;
  for (auto it = touched_.rbegin(); it != touched_.rend(); ++it)
    if (index_.parent(*it) == OccurrenceIndex::kNone) roots.push_back(*it);
  for (std::uint32_t r : roots) {
    if (best_[r] > 0) {
      out.program_gain.emplace_back(index_.program(r), best_[r]);
      out.total_gain += best_[r];
    }
  }
  if (extract_accepted) out.accepted = extract(matches, roots);
  return out;
}

DpOutcome RewriteDp::run_dense(const MatchSet& matches) {
  reset();
  touched_.resize(index_.size());
  for (std::uint32_t i = 0; i < index_.size(); ++i) {
    touched_[i] = index_.size() - 1 - i;
    mark_[i] = 1;
  }
  for (std::size_t i = 0; i < matches.size(); ++i) slot_[matches.occs[i]] = static_cast<std::int32_t>(i);
  evaluate(matches, touched_);

  DpOutcome out;
  std::vector<std::uint32_t> roots;
  for (std::uint32_t p = 0; p < index_.program_count(); ++p) {
    std::uint32_t r = index_.root(p);
    roots.push_back(r);
    if (best_[r] > 0) {
      out.program_gain.emplace_back(p, best_[r]);
      out.total_gain += best_[r];
    }
  }
  out.accepted = extract(matches, roots);
  return out;
}

// ---------------------------------------------------------------------------

UtilityModel::UtilityModel(const OccurrenceIndex& index, UtilityMode mode) : index_(index), mode_(mode) {
  task_min_cost_.assign(index.task_count(), std::numeric_limits<std::int64_t>::max());
  for (std::uint32_t p = 0; p < index.program_count(); ++p) {
    auto& m = task_min_cost_[index.program_task(p)];
    m = std::min(m, index.store().cost(index.node(index.root(p))));
  }
}

std::int64_t UtilityModel::score(const DpOutcome& outcome, std::int64_t abstraction_cost) const {
  if (mode_ == UtilityMode::Sum) return outcome.total_gain - abstraction_cost;
  std::map<std::uint32_t, std::int64_t> task_best;
  for (auto [program, gain] : outcome.program_gain) {
    std::uint32_t task = index_.program_task(program);
    std::int64_t after = index_.store().cost(index_.node(index_.root(program))) - gain;
    auto [it, inserted] = task_best.emplace(task, after);
    if (!inserted) it->second = std::min(it->second, after);
  }
  std::int64_t total = 0;
  for (auto [task, after] : task_best) total += std::max<std::int64_t>(0, task_min_cost_[task] - after);
  return total - abstraction_cost;
}

// ---------------------------------------------------------------------------

RewriteResult rewrite_corpus(ExprStore& store, const Corpus& corpus, const Abstraction& a) {
  if (store.has_hole(a.body)) throw std::invalid_argument("cannot rewrite with a partial abstraction");
  OccurrenceIndex index(store, corpus);
  Shape shape(store, a);

  MatchSet matches;
  std::vector<std::vector<ArgSite>> sites_of;
  std::vector<std::uint32_t> arg_occs;
  std::vector<NodeId> arg_nodes;
  for (std::uint32_t occ = 0; occ < index.size(); ++occ) {
    auto sites = match_at(index, a.body, a.arity, occ);
    if (!sites) continue;
    arg_occs.clear();
    arg_nodes.clear();
    for (const auto& s : *sites) {
      arg_occs.push_back(s.occ);
      arg_nodes.push_back(index.node(s.occ));
    }
    matches.add(occ, shape.local(store, arg_nodes), arg_occs);
    sites_of.push_back(std::move(*sites));
  }

  RewriteDp dp(index);
  DpOutcome outcome = dp.run_dense(matches);

  RewriteResult result;
  result.plan.util_reject.resize(index.size());
  result.plan.util_accept.resize(index.size());
  result.plan.util_best.resize(index.size());
  for (std::uint32_t x = 0; x < index.size(); ++x) {
    result.plan.util_reject[x] = dp.reject_gain(x);
    result.plan.util_accept[x] = dp.accept_gain(x);
    result.plan.util_best[x] = dp.best_gain(x);
  }
  result.plan.accepted = outcome.accepted;
  result.num_uses = outcome.accepted.size();
  result.utility = outcome.total_gain - store.cost(a.body);

  std::vector<std::int32_t> accepted_slot(index.size(), -1);
  for (std::uint32_t occ : outcome.accepted) {
    auto it = std::lower_bound(matches.occs.begin(), matches.occs.end(), occ);
    accepted_slot[occ] = static_cast<std::int32_t>(it - matches.occs.begin());
    result.accepted_programs.push_back(index.program(occ));
  }

  NodeId head = store.prim(a.name);
  std::function<NodeId(std::uint32_t)> emit = [&](std::uint32_t occ) -> NodeId {
    if (std::int32_t s = accepted_slot[occ]; s >= 0) {
      std::vector<NodeId> args;
      for (const ArgSite& site : sites_of[static_cast<std::size_t>(s)])
        args.push_back(shift_free(store, emit(site.occ), site.depth));
      return store.apply(head, args);
    }
    Node n = store.node(index.node(occ));
    if (n.kind == ExprKind::Lam) return store.lam(emit(index.first_child(occ)));
    if (n.kind == ExprKind::App) {
      NodeId f = emit(index.first_child(occ));
      NodeId x = emit(index.second_child(occ));
      return store.app(f, x);
    }
    return index.node(occ);
  };

  result.corpus = corpus;
  for (std::uint32_t p = 0; p < corpus.size(); ++p) result.corpus.programs[p].root = emit(index.root(p));
  return result;
}

std::int64_t min_task_utility(const ExprStore& store, const Corpus& before, const Corpus& after,
                              std::int64_t abstraction_cost) {
  if (before.size() != after.size()) throw std::invalid_argument("corpora are not aligned");
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> per_task;
  for (std::size_t i = 0; i < before.size(); ++i) {
    std::int64_t b = store.cost(before.programs[i].root);
    std::int64_t a = store.cost(after.programs[i].root);
    auto [it, inserted] = per_task.emplace(before.programs[i].task, std::pair{b, a});
    if (!inserted) {
      it->second.first = std::min(it->second.first, b);
      it->second.second = std::min(it->second.second, a);
    }
  }
  std::int64_t total = -abstraction_cost;
  for (const auto& [task, costs] : per_task) total += costs.first - costs.second;
  return total;
}

std::int64_t utility(ExprStore& store, const Abstraction& a, const Corpus& corpus, const SearchConfig& config) {
  RewriteResult r = rewrite_corpus(store, corpus, a);
  if (config.mode == UtilityMode::Sum) return r.utility;
  return min_task_utility(store, corpus, r.corpus, store.cost(a.body));
}

std::string Ratio::str() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value());
  return buf;
}

Ratio compression_ratio(const ExprStore& store, const Corpus& before, const Corpus& after) {
  Ratio r{corpus_cost(store, before), corpus_cost(store, after)};
  if (r.denominator == 0) {
    if (r.numerator != 0) throw std::domain_error("compressed corpus has zero cost");
    return Ratio{};
  }
  return r;
}

NodeId inline_abstractions(ExprStore& store, NodeId e, const std::vector<Abstraction>& library) {
  std::map<SymbolId, std::pair<NodeId, int>> expanded;
  std::function<NodeId(NodeId)> go = [&](NodeId id) -> NodeId {
    Node n = store.node(id);
    if (n.kind == ExprKind::Lam) return store.lam(go(n.left));
    if (n.kind != ExprKind::App && n.kind != ExprKind::Prim) return id;
    std::vector<NodeId> args;
    NodeId head = id;
    while (store.kind(head) == ExprKind::App) {
      args.push_back(store.node(head).right);
      head = store.node(head).left;
    }
    std::reverse(args.begin(), args.end());
    for (auto& arg : args) arg = go(arg);
    if (store.kind(head) == ExprKind::Prim) {
      auto it = expanded.find(static_cast<SymbolId>(store.node(head).payload));
      if (it != expanded.end() && static_cast<std::size_t>(it->second.second) <= args.size()) {
        auto [body, arity] = it->second;
        Mapping l;
        for (int k = 0; k < arity; ++k) l.bind(Binder::absvar(k), args[static_cast<std::size_t>(k)]);
        NodeId out = substitute(store, l, body);
        for (std::size_t k = static_cast<std::size_t>(arity); k < args.size(); ++k) out = store.app(out, args[k]);
        return out;
      }
    } else {
      head = go(head);
    }
    return store.apply(head, args);
  };
  for (const auto& a : library) {
    NodeId body = go(a.body);
    expanded[store.intern(a.name)] = {body, a.arity};
  }
  return go(e);
}

}  // namespace forge
