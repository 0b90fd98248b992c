#include "forge/expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <functional>
#include <sstream>

namespace forge {

std::int64_t CostParams::prim_cost(std::string_view symbol) const {
  if (auto it = cost_prim.find(std::string(symbol)); it != cost_prim.end()) return it->second;
  return cost_prim_default;
}

void CostParams::validate() const {
  if (cost_lam < 0 || cost_app < 0 || cost_var < 0 || cost_absvar < 0 || cost_prim_default < 0)
    throw std::invalid_argument("costs must be non-negative");
  for (const auto& [sym, c] : cost_prim)
    if (c < 0) throw std::invalid_argument("negative cost for primitive " + sym);
}

bool CostParams::leaves_positive() const {
  if (cost_var <= 0 || cost_absvar <= 0 || cost_prim_default <= 0) return false;
  return std::all_of(cost_prim.begin(), cost_prim.end(), [](const auto& kv) { return kv.second > 0; });
}

std::size_t ExprStore::NodeHash::operator()(const Node& n) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(n.kind);
  h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(n.payload);
  h = h * 0x9E3779B97F4A7C15ull ^ to_index(n.left);
  h = h * 0x9E3779B97F4A7C15ull ^ to_index(n.right);
  return static_cast<std::size_t>(h ^ (h >> 29));
}

ExprStore::ExprStore(CostParams params) : params_(std::move(params)) { params_.validate(); }

ExprStore::NodeInfo ExprStore::compute_info(const Node& n) const {
  NodeInfo info{};
  switch (n.kind) {
    case ExprKind::Lam: {
      const auto& b = info_[to_index(n.left)];
      info.cost = params_.cost_lam + b.cost;
      std::uint64_t overflow = b.free_mask & kOverflowBit;
      info.free_mask = ((b.free_mask & ~kOverflowBit) >> 1) | overflow;
      info.terminals = b.terminals;
      info.depth = b.depth + 1;
      info.tree_size = b.tree_size + 1;
      info.flags = b.flags;
      break;
    }
    case ExprKind::App: {
      const auto& f = info_[to_index(n.left)];
      const auto& x = info_[to_index(n.right)];
      info.cost = params_.cost_app + f.cost + x.cost;
      info.free_mask = f.free_mask | x.free_mask;
      info.terminals = f.terminals + x.terminals;
      info.depth = std::max(f.depth, x.depth) + 1;
      info.tree_size = f.tree_size + x.tree_size + 1;
      info.flags = f.flags | x.flags;
      break;
    }
    case ExprKind::Var:
      info.cost = params_.cost_var;
      info.free_mask = n.payload < 63 ? std::uint64_t{1} << n.payload : kOverflowBit;
      info.terminals = 1;
      info.tree_size = 1;
      break;
    case ExprKind::ShiftedVar:
      info.cost = params_.cost_var;
      info.tree_size = 1;
      info.flags = kHasShifted;
      break;
    case ExprKind::Prim:
      info.cost = symbol_costs_[static_cast<std::uint32_t>(n.payload)];
      info.terminals = 1;
      info.tree_size = 1;
      break;
    case ExprKind::AbsVar:
      info.cost = params_.cost_absvar;
      info.tree_size = 1;
      info.flags = kHasAbsVar;
      break;
    case ExprKind::Hole:
      info.cost = 0;
      info.tree_size = 1;
      info.flags = kHasHole;
      break;
  }
  return info;
}

NodeId ExprStore::insert(const Node& n) {
  if (auto it = index_.find(n); it != index_.end()) return it->second;
  auto id = static_cast<NodeId>(nodes_.size());
  NodeInfo info = compute_info(n);
  nodes_.push_back(n);
  info_.push_back(info);
  index_.emplace(n, id);
  return id;
}

NodeId ExprStore::lam(NodeId body) { return insert({ExprKind::Lam, 0, body, NodeId{}}); }
NodeId ExprStore::app(NodeId fun, NodeId arg) { return insert({ExprKind::App, 0, fun, arg}); }

NodeId ExprStore::var(std::int32_t index) {
  if (index < 0) throw std::invalid_argument("negative de Bruijn index");
  return insert({ExprKind::Var, index});
}

NodeId ExprStore::shifted_var(std::int32_t index) { return insert({ExprKind::ShiftedVar, index}); }
NodeId ExprStore::prim(std::string_view symbol) { return prim(intern(symbol)); }
NodeId ExprStore::prim(SymbolId symbol) { return insert({ExprKind::Prim, static_cast<std::int32_t>(to_index(symbol))}); }
NodeId ExprStore::absvar(std::int32_t id) { return insert({ExprKind::AbsVar, id}); }
NodeId ExprStore::hole(std::int32_t id) { return insert({ExprKind::Hole, id}); }

NodeId ExprStore::apply(NodeId fun, const std::vector<NodeId>& args) {
  for (NodeId a : args) fun = app(fun, a);
  return fun;
}

SymbolId ExprStore::intern(std::string_view symbol) {
  if (auto found = find_symbol(symbol)) return *found;
  auto id = static_cast<SymbolId>(symbols_.size());
  symbols_.emplace_back(symbol);
  symbol_costs_.push_back(params_.prim_cost(symbol));
  symbol_index_.emplace(std::string(symbol), id);
  return id;
}

std::optional<SymbolId> ExprStore::find_symbol(std::string_view symbol) const {
  if (auto it = symbol_index_.find(std::string(symbol)); it != symbol_index_.end()) return it->second;
  return std::nullopt;
}

std::int32_t ExprStore::free_bound(NodeId id) const {
  std::uint64_t m = info_[to_index(id)].free_mask;
  if (m & kOverflowBit) return std::numeric_limits<std::int32_t>::max();
  return 64 - std::countl_zero(m);
}

std::int32_t ExprStore::min_free(NodeId id) const {
  std::uint64_t m = info_[to_index(id)].free_mask;
  if (m == 0) return std::numeric_limits<std::int32_t>::max();
  return std::countr_zero(m);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Sexp {
  std::string atom;
  std::vector<Sexp> items;
  bool is_list = false;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  Sexp read_all() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty input");
    Sexp s = read();
    skip_ws();
    if (pos_ < text_.size()) throw ParseError("unexpected trailing input at offset " + std::to_string(pos_));
    return s;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Sexp read() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unbalanced parentheses: unexpected end of input");
    char c = text_[pos_];
    if (c == ')') throw ParseError("unbalanced parentheses: unexpected ')' at offset " + std::to_string(pos_));
    if (c == '(') {
      ++pos_;
      Sexp list;
      list.is_list = true;
      for (;;) {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unbalanced parentheses: missing ')'");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        list.items.push_back(read());
      }
      if (list.items.empty()) throw ParseError("empty list");
      return list;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    Sexp atom;
    atom.atom = std::string(text_.substr(start, pos_ - start));
    return atom;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<std::int32_t> parse_int(std::string_view digits, bool allow_negative) {
  if (digits.empty()) return std::nullopt;
  if (!allow_negative && digits.front() == '-') return std::nullopt;
  std::int32_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return value;
}

constexpr std::string_view kAlpha = "α";

NodeId build(ExprStore& store, const Sexp& s) {
  if (!s.is_list) {
    std::string_view a = s.atom;
    if (a.starts_with('$')) {
      auto i = parse_int(a.substr(1), false);
      if (!i) throw ParseError("malformed variable '" + s.atom + "'");
      return store.var(*i);
    }
    if (a.starts_with("#α")) a.remove_prefix(1);
    if (a.starts_with(kAlpha)) {
      auto i = parse_int(a.substr(kAlpha.size()), false);
      if (!i) throw ParseError("malformed abstraction variable '" + s.atom + "'");
      return store.absvar(*i);
    }
    if (a.starts_with('#') && a.size() > 1) {
      auto i = parse_int(a.substr(1), true);
      if (!i) throw ParseError("malformed shifted variable '" + s.atom + "'");
      return store.shifted_var(*i);
    }
    if (a.starts_with("??")) {
      auto rest = a.substr(2);
      if (rest.empty()) return store.hole(0);
      auto i = parse_int(rest, false);
      if (!i) throw ParseError("malformed hole '" + s.atom + "'");
      return store.hole(*i);
    }
    if (a == "lam") throw ParseError("'lam' must head a list");
    return store.prim(a);
  }
  const auto& items = s.items;
  if (!items.front().is_list && items.front().atom == "lam") {
    if (items.size() < 2) throw ParseError("lam without body");
    NodeId body = build(store, items[1]);
    for (std::size_t i = 2; i < items.size(); ++i) body = store.app(body, build(store, items[i]));
    return store.lam(body);
  }
  if (items.size() == 1) return build(store, items.front());
  NodeId f = build(store, items.front());
  for (std::size_t i = 1; i < items.size(); ++i) f = store.app(f, build(store, items[i]));
  return f;
}

void print_into(const ExprStore& store, NodeId id, std::string& out) {
  const Node& n = store.node(id);
  switch (n.kind) {
    case ExprKind::Lam:
      out += "(lam ";
      print_into(store, n.left, out);
      out += ')';
      return;
    case ExprKind::App: {
      std::vector<NodeId> args;
      NodeId head = id;
      while (store.kind(head) == ExprKind::App) {
        args.push_back(store.node(head).right);
        head = store.node(head).left;
      }
      out += '(';
      print_into(store, head, out);
      for (auto it = args.rbegin(); it != args.rend(); ++it) {
        out += ' ';
        print_into(store, *it, out);
      }
      out += ')';
      return;
    }
    case ExprKind::Var:
      out += '$';
      out += std::to_string(n.payload);
      return;
    case ExprKind::ShiftedVar:
      out += '#';
      out += std::to_string(n.payload);
      return;
    case ExprKind::Prim:
      out += store.symbol(static_cast<SymbolId>(n.payload));
      return;
    case ExprKind::AbsVar:
      out += kAlpha;
      out += std::to_string(n.payload);
      return;
    case ExprKind::Hole:
      out += "??";
      out += std::to_string(n.payload);
      return;
  }
}

std::int64_t cost_impl(const ExprStore& store, NodeId id, const CostParams& p, bool star) {
  const Node& n = store.node(id);
  switch (n.kind) {
    case ExprKind::Lam: return p.cost_lam + cost_impl(store, n.left, p, star);
    case ExprKind::App: return p.cost_app + cost_impl(store, n.left, p, star) + cost_impl(store, n.right, p, star);
    case ExprKind::Var:
    case ExprKind::ShiftedVar: return p.cost_var;
    case ExprKind::Prim: return p.prim_cost(store.symbol(static_cast<SymbolId>(n.payload)));
    case ExprKind::AbsVar: return star ? 0 : p.cost_absvar;
    case ExprKind::Hole: return 0;
  }
  return 0;
}

bool equal_shift_rec(const ExprStore& store, NodeId a, NodeId b, std::int32_t delta, std::int32_t inner) {
  if (a == b && (delta == 0 || store.closed(a))) return true;
  const Node& x = store.node(a);
  const Node& y = store.node(b);
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case ExprKind::Lam: return equal_shift_rec(store, x.left, y.left, delta, inner + 1);
    case ExprKind::App:
      return equal_shift_rec(store, x.left, y.left, delta, inner) &&
             equal_shift_rec(store, x.right, y.right, delta, inner);
    case ExprKind::Var:
      if (x.payload < inner || y.payload < inner) return x.payload == y.payload;
      return x.payload - y.payload == delta;
    default: return x == y;
  }
}

}  // namespace

NodeId parse(ExprStore& store, std::string_view text) {
  Reader reader(text);
  return build(store, reader.read_all());
}

std::string print(const ExprStore& store, NodeId id) {
  std::string out;
  print_into(store, id, out);
  return out;
}

std::int64_t cost(const ExprStore& store, NodeId id, const CostParams& params) {
  return cost_impl(store, id, params, false);
}

std::int64_t cost_star(const ExprStore& store, NodeId id, const CostParams& params) {
  return cost_impl(store, id, params, true);
}

bool equal_modulo_shift(const ExprStore& store, NodeId e1, std::int32_t shift1, NodeId e2, std::int32_t shift2) {
  return equal_shift_rec(store, e1, e2, shift1 - shift2, 0);
}

NodeId shift_free(ExprStore& store, NodeId e, std::int32_t amount) {
  if (amount == 0 || store.closed(e)) return e;
  std::function<NodeId(NodeId, std::int32_t)> go = [&](NodeId id, std::int32_t inner) -> NodeId {
    if (store.closed(id)) return id;
    Node n = store.node(id);
    switch (n.kind) {
      case ExprKind::Lam: return store.lam(go(n.left, inner + 1));
      case ExprKind::App: {
        NodeId f = go(n.left, inner);
        NodeId x = go(n.right, inner);
        return store.app(f, x);
      }
      case ExprKind::Var:
        if (n.payload < inner) return id;
        if (n.payload - amount < inner) throw std::logic_error("shift_free would capture a variable");
        return store.var(n.payload - amount);
      default: return id;
    }
  };
  return go(e, 0);
}

}  // namespace forge
