#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mucp/type.hpp"

namespace mucp {

struct ClosureElement {
  Type type;
  /// Index of the root this element was first reached from.
  std::size_t root = 0;
  /// Shortest step sequence from that root: 'l'/'r' for operands, 'b' for
  /// the body of a binder (i.e. its unfolding).
  std::string address;
};

/// Finite set of closed types reachable from one or more roots by taking
/// connective operands and unfolding fixed points, with the subformula
/// preorder precomputed over it.
class ClosureIndex {
 public:
  explicit ClosureIndex(const Type& root);
  explicit ClosureIndex(std::span<const Type> roots);

  const std::vector<ClosureElement>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  std::optional<std::size_t> find(const Type& t) const;
  bool contains(const Type& t) const { return find(t).has_value(); }

  /// a ≼ b. Throws std::out_of_range if either is outside the closure.
  bool leq(const Type& a, const Type& b) const;
  bool leq(std::size_t a, std::size_t b) const { return order_[a * elements_.size() + b]; }

  /// The ≼-least member of s, if one member lies below all others.
  /// Throws std::out_of_range for members outside the closure.
  std::optional<Type> min(std::span<const Type> s) const;

 private:
  void add_root(const Type& root, std::size_t root_index);
  std::size_t index_of(const Type& t) const;

  std::vector<ClosureElement> elements_;
  std::unordered_map<Type, std::size_t> lookup_;
  std::vector<bool> order_;
};

inline ClosureIndex closure(const Type& root) { return ClosureIndex(root); }

bool subformula_leq(const ClosureIndex& idx, const Type& a, const Type& b);

std::optional<Type> min_type(const ClosureIndex& idx, std::span<const Type> s);

/// The ≼-minimum of s computed directly from the subterm order, without an
/// index. Equal to min_type over any closure containing s.
std::optional<Type> subformula_min(std::span<const Type> s);

}  // namespace mucp
