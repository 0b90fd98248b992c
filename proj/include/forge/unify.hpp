#pragma once

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>

#include "forge/expr.hpp"

namespace forge {

/// Key of a mapping entry: an abstraction variable or a hole.
struct Binder {
  enum class Kind : std::uint8_t { AbsVar, Hole };
  Kind kind;
  std::int32_t id;

  static Binder absvar(std::int32_t id) { return {Kind::AbsVar, id}; }
  static Binder hole(std::int32_t id) { return {Kind::Hole, id}; }

  auto operator<=>(const Binder&) const = default;
};

/// Partial map from abstraction variables and holes to expressions. Hole
/// bindings may contain shifted variables; abstraction-variable bindings
/// produced by a valid match never do.
class Mapping {
 public:
  Mapping() = default;
  Mapping(std::initializer_list<std::pair<const Binder, NodeId>> init) : entries_(init) {}

  std::optional<NodeId> find(Binder key) const;
  void bind(Binder key, NodeId value) { entries_[key] = value; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const Mapping&) const = default;

 private:
  std::map<Binder, NodeId> entries_;
};

class UnboundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ↓_d: lowers indices of variables free at depth `d`; the variable bound
/// exactly at `d` becomes a shifted variable `&(i-1)`.
NodeId downshift(ExprStore& store, NodeId e, std::int32_t d);

/// ↑_d: inverse of downshift on well-formed input.
NodeId upshift(ExprStore& store, NodeId e, std::int32_t d);

/// Modified beta reduction `l ∘ body`. Throws UnboundError if `body`
/// mentions a variable or hole that `l` does not bind.
NodeId substitute(ExprStore& store, const Mapping& l, NodeId body);

/// Union of two mappings; nullopt when a key is bound to different terms.
std::optional<Mapping> merge(const Mapping& l1, const Mapping& l2);

/// Lambda-aware unification of a (partial) abstraction body `pattern` with a
/// pure expression `e`. On success `substitute(result, pattern) == e`.
std::optional<Mapping> lambda_unify(ExprStore& store, NodeId pattern, NodeId e);

/// WF_d: every shifted variable `&i` sits under more than `i` lambdas
/// counting from depth `d`.
bool well_formed(const ExprStore& store, NodeId e, std::int32_t d);

/// True when no abstraction-variable binding contains a shifted variable,
/// i.e. the unification result is a usable match location.
bool valid_match(const ExprStore& store, const Mapping& l);

}  // namespace forge
