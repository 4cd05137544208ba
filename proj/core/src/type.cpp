#include "mucp/type.hpp"

#include <algorithm>
#include <stdexcept>

namespace mucp {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

bool structurally_equal(const Type& a, const Type& b) {
  if (a.identity() == b.identity()) return true;
  if (a.hash() != b.hash() || a.size() != b.size() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Type::Kind::Var:
      return a.index() == b.index();
    case Type::Kind::Const:
      return a.constant() == b.constant();
    case Type::Kind::Bin:
      return a.connective() == b.connective() && structurally_equal(a.left(), b.left()) &&
             structurally_equal(a.right(), b.right());
    case Type::Kind::Fix:
      return a.binder() == b.binder() && structurally_equal(a.body(), b.body());
  }
  return false;
}

Type substitute(const Type& t, int depth, const Type& replacement) {
  if (t.free_depth() <= depth) return t;
  switch (t.kind()) {
    case Type::Kind::Var:
      return t.index() == depth ? replacement : t;
    case Type::Kind::Const:
      return t;
    case Type::Kind::Bin:
      return Type::bin(t.connective(), substitute(t.left(), depth, replacement),
                       substitute(t.right(), depth, replacement));
    case Type::Kind::Fix:
      return Type::fix(t.binder(), t.name(), substitute(t.body(), depth + 1, replacement));
  }
  return t;
}

std::optional<TypeProblem> check(const Type& t, int depth, int last_connective, std::string& path) {
  switch (t.kind()) {
    case Type::Kind::Var: {
      if (t.index() >= depth) {
        return TypeProblem{TypeProblem::Kind::Open, path, "free type variable"};
      }
      int level = depth - 1 - t.index();
      if (last_connective < level + 1) {
        return TypeProblem{TypeProblem::Kind::Unguarded, path,
                           "unguarded type variable: no connective between it and its binder"};
      }
      return std::nullopt;
    }
    case Type::Kind::Const:
      return std::nullopt;
    case Type::Kind::Bin: {
      path.push_back('l');
      auto p = check(t.left(), depth, depth, path);
      path.pop_back();
      if (p) return p;
      path.push_back('r');
      p = check(t.right(), depth, depth, path);
      path.pop_back();
      return p;
    }
    case Type::Kind::Fix: {
      path.push_back('b');
      auto p = check(t.body(), depth + 1, last_connective, path);
      path.pop_back();
      return p;
    }
  }
  return std::nullopt;
}

}  // namespace

Type Type::var(int index) {
  if (index < 0) throw std::invalid_argument("negative de Bruijn index");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->index = index;
  n->free_depth = index + 1;
  n->hash = mix(0x51, static_cast<std::size_t>(index));
  return Type(std::move(n));
}

Type Type::constant(Constant c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->constant = c;
  n->hash = mix(0x7c, static_cast<std::size_t>(c));
  return Type(std::move(n));
}

Type Type::bin(Connective op, Type left, Type right) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Bin;
  n->connective = op;
  n->free_depth = std::max(left.free_depth(), right.free_depth());
  n->size = 1 + left.size() + right.size();
  n->hash = mix(mix(mix(0xb1, static_cast<std::size_t>(op)), left.hash()), right.hash());
  n->left = std::move(left.node_);
  n->right = std::move(right.node_);
  return Type(std::move(n));
}

Type Type::fix(Binder b, std::string name, Type body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Fix;
  n->binder = b;
  n->name = std::move(name);
  n->free_depth = std::max(0, body.free_depth() - 1);
  n->size = 1 + body.size();
  n->hash = mix(mix(0xf1, static_cast<std::size_t>(b)), body.hash());
  n->left = std::move(body.node_);
  return Type(std::move(n));
}

bool operator==(const Type& a, const Type& b) { return structurally_equal(a, b); }

Constant dual(Constant c) {
  switch (c) {
    case Constant::Zero: return Constant::Top;
    case Constant::Top: return Constant::Zero;
    case Constant::One: return Constant::Bot;
    case Constant::Bot: return Constant::One;
  }
  return c;
}

Connective dual(Connective op) {
  switch (op) {
    case Connective::Tensor: return Connective::Par;
    case Connective::Par: return Connective::Tensor;
    case Connective::Plus: return Connective::With;
    case Connective::With: return Connective::Plus;
  }
  return op;
}

Binder dual(Binder b) { return b == Binder::Mu ? Binder::Nu : Binder::Mu; }

Type dual(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Var:
      return t;
    case Type::Kind::Const:
      return Type::constant(dual(t.constant()));
    case Type::Kind::Bin:
      return Type::bin(dual(t.connective()), dual(t.left()), dual(t.right()));
    case Type::Kind::Fix:
      return Type::fix(dual(t.binder()), t.name(), dual(t.body()));
  }
  return t;
}

Type unfold(const Type& t) {
  if (!t.is_fix()) throw std::invalid_argument("unfold: not a fixed point");
  if (!t.closed()) throw std::invalid_argument("unfold: type is not closed");
  return substitute(t.body(), 0, t);
}

Type unfold_head(const Type& t) {
  Type cur = t;
  // A guarded closed type reaches a non-binder head in at most
  // (binder nesting depth) steps; the bound only catches misuse.
  for (std::size_t steps = 0; cur.is_fix(); ++steps) {
    if (steps > t.size() + 1) throw std::invalid_argument("unfold_head: unguarded type");
    cur = unfold(cur);
  }
  return cur;
}

bool occurs_in(const Type& a, const Type& b) {
  if (b.size() < a.size()) return false;
  if (a == b) return true;
  switch (b.kind()) {
    case Type::Kind::Bin:
      return occurs_in(a, b.left()) || occurs_in(a, b.right());
    case Type::Kind::Fix:
      return occurs_in(a, b.body());
    default:
      return false;
  }
}

std::optional<TypeProblem> validate_type(const Type& t) {
  std::string path;
  return check(t, 0, -1, path);
}

std::string to_string(Constant c) {
  switch (c) {
    case Constant::Zero: return "0";
    case Constant::One: return "1";
    case Constant::Bot: return "bot";
    case Constant::Top: return "top";
  }
  return "?";
}

std::string to_string(Connective op) {
  switch (op) {
    case Connective::Tensor: return "*";
    case Connective::Par: return "par";
    case Connective::Plus: return "+";
    case Connective::With: return "&";
  }
  return "?";
}

std::string to_string(Binder b) { return b == Binder::Mu ? "mu" : "nu"; }

}  // namespace mucp
