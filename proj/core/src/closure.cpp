#include "mucp/closure.hpp"

#include <deque>
#include <stdexcept>

namespace mucp {

ClosureIndex::ClosureIndex(const Type& root) : ClosureIndex(std::span<const Type>(&root, 1)) {}

ClosureIndex::ClosureIndex(std::span<const Type> roots) {
  for (std::size_t i = 0; i < roots.size(); ++i) add_root(roots[i], i);
  const std::size_t n = elements_.size();
  order_.assign(n * n, false);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      order_[a * n + b] = occurs_in(elements_[a].type, elements_[b].type);
    }
  }
}

void ClosureIndex::add_root(const Type& root, std::size_t root_index) {
  if (!root.closed()) throw std::invalid_argument("closure: root type is not closed");
  // Breadth-first so the first address recorded for an element is a shortest one.
  std::deque<std::size_t> work;
  auto visit = [&](const Type& t, std::string address) {
    if (lookup_.count(t)) return;
    lookup_.emplace(t, elements_.size());
    elements_.push_back({t, root_index, std::move(address)});
    work.push_back(elements_.size() - 1);
  };
  visit(root, "");
  while (!work.empty()) {
    std::size_t i = work.front();
    work.pop_front();
    const Type t = elements_[i].type;
    const std::string address = elements_[i].address;
    if (t.is_bin()) {
      visit(t.left(), address + "l");
      visit(t.right(), address + "r");
    } else if (t.is_fix()) {
      visit(unfold(t), address + "b");
    }
  }
}

std::optional<std::size_t> ClosureIndex::find(const Type& t) const {
  auto it = lookup_.find(t);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t ClosureIndex::index_of(const Type& t) const {
  auto i = find(t);
  if (!i) throw std::out_of_range("type is not an element of the closure");
  return *i;
}

bool ClosureIndex::leq(const Type& a, const Type& b) const { return leq(index_of(a), index_of(b)); }

std::optional<Type> ClosureIndex::min(std::span<const Type> s) const {
  std::vector<std::size_t> ids;
  ids.reserve(s.size());
  for (const Type& t : s) ids.push_back(index_of(t));
  std::optional<std::size_t> best;
  for (std::size_t c : ids) {
    bool below_all = true;
    for (std::size_t o : ids) {
      if (!leq(c, o)) {
        below_all = false;
        break;
      }
    }
    if (!below_all) continue;
    // ≼ is antisymmetric on closed types, so ties only arise from duplicates
    // in s; the outermost (shortest address) representative wins regardless.
    if (!best || elements_[c].address.size() < elements_[*best].address.size()) best = c;
  }
  if (!best) return std::nullopt;
  return elements_[*best].type;
}

bool subformula_leq(const ClosureIndex& idx, const Type& a, const Type& b) { return idx.leq(a, b); }

std::optional<Type> min_type(const ClosureIndex& idx, std::span<const Type> s) { return idx.min(s); }

std::optional<Type> subformula_min(std::span<const Type> s) {
  for (const Type& c : s) {
    bool below_all = true;
    for (const Type& o : s) {
      if (!occurs_in(c, o)) {
        below_all = false;
        break;
      }
    }
    if (below_all) return c;
  }
  return std::nullopt;
}

}  // namespace mucp
