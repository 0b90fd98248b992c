#include "forge/unify.hpp"

#include <string>
#include <vector>

namespace forge {

std::optional<NodeId> Mapping::find(Binder key) const {
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  return std::nullopt;
}

NodeId downshift(ExprStore& store, NodeId e, std::int32_t d) {
  if (!store.has_shifted(e) && store.free_bound(e) <= d) return e;
  Node n = store.node(e);
  switch (n.kind) {
    case ExprKind::Lam: return store.lam(downshift(store, n.left, d + 1));
    case ExprKind::App: {
      NodeId f = downshift(store, n.left, d);
      NodeId x = downshift(store, n.right, d);
      return store.app(f, x);
    }
    case ExprKind::Var:
      if (n.payload < d) return e;
      if (n.payload > d) return store.var(n.payload - 1);
      return store.shifted_var(n.payload - 1);
    case ExprKind::ShiftedVar: return store.shifted_var(n.payload - 1);
    default: return e;
  }
}

NodeId upshift(ExprStore& store, NodeId e, std::int32_t d) {
  if (!store.has_shifted(e) && store.free_bound(e) <= d) return e;
  Node n = store.node(e);
  switch (n.kind) {
    case ExprKind::Lam: return store.lam(upshift(store, n.left, d + 1));
    case ExprKind::App: {
      NodeId f = upshift(store, n.left, d);
      NodeId x = upshift(store, n.right, d);
      return store.app(f, x);
    }
    case ExprKind::Var: return n.payload < d ? e : store.var(n.payload + 1);
    case ExprKind::ShiftedVar:
      if (n.payload + 1 == d) return store.var(n.payload + 1);
      return store.shifted_var(n.payload + 1);
    default: return e;
  }
}

namespace {

class Substituter {
 public:
  Substituter(ExprStore& store, const Mapping& l) : store_(store), mapping_(l) {}

  NodeId run(NodeId e, std::int32_t lambdas) {
    if (!store_.has_absvar(e) && !store_.has_hole(e)) return e;
    Node n = store_.node(e);
    switch (n.kind) {
      case ExprKind::Lam: return store_.lam(run(n.left, lambdas + 1));
      case ExprKind::App: {
        NodeId f = run(n.left, lambdas);
        NodeId x = run(n.right, lambdas);
        return store_.app(f, x);
      }
      case ExprKind::AbsVar: return lookup(Binder::absvar(n.payload), lambdas);
      case ExprKind::Hole: return lookup(Binder::hole(n.payload), lambdas);
      default: return e;
    }
  }

 private:
  // Binding after `lambdas` applications of UpshiftAll.
  NodeId lookup(Binder key, std::int32_t lambdas) {
    auto bound = mapping_.find(key);
    if (!bound) {
      std::string what = key.kind == Binder::Kind::AbsVar ? "abstraction variable α" : "hole ??";
      throw UnboundError("unbound " + what + std::to_string(key.id));
    }
    auto& shifted = cache_[key];
    if (shifted.empty()) shifted.push_back(*bound);
    while (static_cast<std::int32_t>(shifted.size()) <= lambdas) shifted.push_back(upshift(store_, shifted.back(), 0));
    return shifted[static_cast<std::size_t>(lambdas)];
  }

  ExprStore& store_;
  const Mapping& mapping_;
  std::map<Binder, std::vector<NodeId>> cache_;
};

std::optional<Mapping> unify_rec(ExprStore& store, NodeId pattern, NodeId e) {
  // U-Same
  if (store.is_pure(pattern)) {
    if (pattern == e) return Mapping{};
    return std::nullopt;
  }
  Node p = store.node(pattern);
  switch (p.kind) {
    case ExprKind::AbsVar: return Mapping{{Binder::absvar(p.payload), e}};
    case ExprKind::Hole: return Mapping{{Binder::hole(p.payload), e}};
    case ExprKind::App: {
      if (store.kind(e) != ExprKind::App) return std::nullopt;
      Node x = store.node(e);
      auto l1 = unify_rec(store, p.left, x.left);
      if (!l1) return std::nullopt;
      auto l2 = unify_rec(store, p.right, x.right);
      if (!l2) return std::nullopt;
      return merge(*l1, *l2);
    }
    case ExprKind::Lam: {
      if (store.kind(e) != ExprKind::Lam) return std::nullopt;
      auto inner = unify_rec(store, p.left, store.node(e).left);
      if (!inner) return std::nullopt;
      Mapping shifted;
      for (const auto& [key, value] : *inner) shifted.bind(key, downshift(store, value, 0));
      return shifted;
    }
    default: return std::nullopt;
  }
}

}  // namespace

NodeId substitute(ExprStore& store, const Mapping& l, NodeId body) {
  Substituter s(store, l);
  return s.run(body, 0);
}

std::optional<Mapping> merge(const Mapping& l1, const Mapping& l2) {
  Mapping out = l1;
  for (const auto& [key, value] : l2) {
    if (auto existing = out.find(key)) {
      if (*existing != value) return std::nullopt;
    } else {
      out.bind(key, value);
    }
  }
  return out;
}

std::optional<Mapping> lambda_unify(ExprStore& store, NodeId pattern, NodeId e) {
  if (!store.is_pure(e)) throw std::invalid_argument("lambda_unify target must be a pure expression");
  return unify_rec(store, pattern, e);
}

bool well_formed(const ExprStore& store, NodeId e, std::int32_t d) {
  if (!store.has_shifted(e)) return true;
  const Node& n = store.node(e);
  switch (n.kind) {
    case ExprKind::Lam: return well_formed(store, n.left, d + 1);
    case ExprKind::App: return well_formed(store, n.left, d) && well_formed(store, n.right, d);
    case ExprKind::ShiftedVar: return n.payload < d;
    default: return true;
  }
}

bool valid_match(const ExprStore& store, const Mapping& l) {
  for (const auto& [key, value] : l)
    if (key.kind == Binder::Kind::AbsVar && store.has_shifted(value)) return false;
  return true;
}

}  // namespace forge
