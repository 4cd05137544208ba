#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mucp {

enum class Constant { Zero, One, Bot, Top };
enum class Connective { Tensor, Par, Plus, With };
enum class Binder { Mu, Nu };

/// Session type: a μMALL∞ proposition.
///
/// Bound variables are stored as de Bruijn indices, so equality and hashing
/// ignore the choice of binder names. Binder names are kept only as printing
/// hints. A `Type` is an immutable handle; copies share structure.
class Type {
 public:
  enum class Kind { Var, Const, Bin, Fix };

  static Type var(int index);
  static Type constant(Constant c);
  static Type bin(Connective op, Type left, Type right);
  static Type fix(Binder b, std::string name, Type body);

  static Type zero() { return constant(Constant::Zero); }
  static Type one() { return constant(Constant::One); }
  static Type bot() { return constant(Constant::Bot); }
  static Type top() { return constant(Constant::Top); }
  static Type tensor(Type l, Type r) { return bin(Connective::Tensor, std::move(l), std::move(r)); }
  static Type par(Type l, Type r) { return bin(Connective::Par, std::move(l), std::move(r)); }
  static Type plus(Type l, Type r) { return bin(Connective::Plus, std::move(l), std::move(r)); }
  static Type with(Type l, Type r) { return bin(Connective::With, std::move(l), std::move(r)); }
  static Type mu(std::string name, Type body) { return fix(Binder::Mu, std::move(name), std::move(body)); }
  static Type nu(std::string name, Type body) { return fix(Binder::Nu, std::move(name), std::move(body)); }

  Type() = delete;

  Kind kind() const { return node_->kind; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_const() const { return kind() == Kind::Const; }
  bool is_bin() const { return kind() == Kind::Bin; }
  bool is_fix() const { return kind() == Kind::Fix; }
  bool is_const(Constant c) const { return is_const() && constant() == c; }
  bool is_fix(Binder b) const { return is_fix() && binder() == b; }

  int index() const { return node_->index; }
  Constant constant() const { return node_->constant; }
  Connective connective() const { return node_->connective; }
  Binder binder() const { return node_->binder; }
  const std::string& name() const { return node_->name; }
  Type left() const { return Type(node_->left); }
  Type right() const { return Type(node_->right); }
  Type body() const { return Type(node_->left); }

  /// Number of enclosing binders this term needs; 0 means closed.
  int free_depth() const { return node_->free_depth; }
  bool closed() const { return free_depth() == 0; }
  std::size_t size() const { return node_->size; }
  std::size_t hash() const { return node_->hash; }

  /// Identity of the shared node; equal identities imply equal types.
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind;
    int index = 0;
    Constant constant = Constant::Zero;
    Connective connective = Connective::Tensor;
    Binder binder = Binder::Mu;
    std::string name;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    int free_depth = 0;
    std::size_t size = 1;
    std::size_t hash = 0;
  };

  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

struct TypeHash {
  std::size_t operator()(const Type& t) const { return t.hash(); }
};

Constant dual(Constant c);
Connective dual(Connective op);
Binder dual(Binder b);

/// Swaps 0/⊤, 1/⊥, ⊗/⅋, ⊕/& and μ/ν; variables are fixed.
Type dual(const Type& t);

/// A[σX.A/X] for t = σX.A. Throws std::invalid_argument when t is not a
/// fixed point or not closed.
Type unfold(const Type& t);

/// Unfolds until the head is not a fixed point. Requires a closed, guarded type.
Type unfold_head(const Type& t);

/// True when a occurs as a subterm of b (reflexive). This is the ≼ order on
/// closed types.
bool occurs_in(const Type& a, const Type& b);

struct TypeProblem {
  enum class Kind { Open, Unguarded };
  Kind kind;
  /// Steps from the root: 'l', 'r' for operands, 'b' for a binder body.
  std::string path;
  std::string message;
};

/// Reports the first position where t is open or unguarded.
std::optional<TypeProblem> validate_type(const Type& t);

std::string to_string(Constant c);
std::string to_string(Connective op);
std::string to_string(Binder b);

}  // namespace mucp

template <>
struct std::hash<mucp::Type> {
  std::size_t operator()(const mucp::Type& t) const { return t.hash(); }
};
