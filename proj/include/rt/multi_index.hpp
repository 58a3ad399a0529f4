#pragma once
// Multi-indices in Z^n, half-open index boxes and truncation lattices.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rt/error.hpp"

namespace rt {

using Index = std::int64_t;

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n, Index fill = 0) : entries_(n, fill) {}
  MultiIndex(std::initializer_list<Index> entries) : entries_(entries) {}
  explicit MultiIndex(std::vector<Index> entries) : entries_(std::move(entries)) {}

  /// The unit index whose entry `l` is 1 and every other entry 0.
  static MultiIndex unit(std::size_t n, std::size_t l) {
    MultiIndex e(n);
    e.at(l) = 1;
    return e;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  Index operator[](std::size_t j) const { return entries_[j]; }
  Index& operator[](std::size_t j) { return entries_[j]; }
  Index at(std::size_t j) const { return entries_.at(j); }
  Index& at(std::size_t j) { return entries_.at(j); }

  std::span<const Index> entries() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  bool is_natural() const {
    return std::all_of(entries_.begin(), entries_.end(), [](Index v) { return v >= 0; });
  }

  Index total() const { return std::accumulate(entries_.begin(), entries_.end(), Index{0}); }

  MultiIndex& operator+=(const MultiIndex& o) {
    require_same_size(o);
    for (std::size_t j = 0; j < size(); ++j) entries_[j] += o.entries_[j];
    return *this;
  }
  MultiIndex& operator-=(const MultiIndex& o) {
    require_same_size(o);
    for (std::size_t j = 0; j < size(); ++j) entries_[j] -= o.entries_[j];
    return *this;
  }
  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) { return a += b; }
  friend MultiIndex operator-(MultiIndex a, const MultiIndex& b) { return a -= b; }
  friend MultiIndex operator-(MultiIndex a) {
    for (auto& v : a.entries_) v = -v;
    return a;
  }

  // Equality and a lexicographic total order for use as a map key. The
  // componentwise partial order lives in all_leq / all_less.
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t j = 0; j < size(); ++j) {
      if (j) s += ",";
      s += std::to_string(entries_[j]);
    }
    if (size() == 1) s += ",";
    return s + ")";
  }

  void require_same_size(const MultiIndex& o) const {
    if (o.size() != size())
      throw ConfigError("dimension mismatch: " + to_string() + " vs " + o.to_string());
  }

 private:
  std::vector<Index> entries_;
};

inline std::ostream& operator<<(std::ostream& os, const MultiIndex& k) { return os << k.to_string(); }

/// a <= b componentwise.
inline bool all_leq(const MultiIndex& a, const MultiIndex& b) {
  a.require_same_size(b);
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] > b[j]) return false;
  return true;
}

/// a < b in every component.
inline bool all_less(const MultiIndex& a, const MultiIndex& b) {
  a.require_same_size(b);
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] >= b[j]) return false;
  return true;
}

inline MultiIndex componentwise_max(const MultiIndex& a, const MultiIndex& b) {
  a.require_same_size(b);
  MultiIndex r = a;
  for (std::size_t j = 0; j < a.size(); ++j) r[j] = std::max(a[j], b[j]);
  return r;
}

inline MultiIndex componentwise_min(const MultiIndex& a, const MultiIndex& b) {
  a.require_same_size(b);
  MultiIndex r = a;
  for (std::size_t j = 0; j < a.size(); ++j) r[j] = std::min(a[j], b[j]);
  return r;
}

/// Half-open box {k : lower_j <= k_j < upper_j}. Empty boxes are allowed.
class IndexBox {
 public:
  IndexBox() = default;
  IndexBox(MultiIndex lower, MultiIndex upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    lower_.require_same_size(upper_);
    if (lower_.size() == 0) throw ConfigError("box dimension must be at least 1");
  }

  /// The 1 x ... x 1 box holding the single index k.
  static IndexBox singleton(const MultiIndex& k) {
    MultiIndex up = k;
    for (std::size_t j = 0; j < up.size(); ++j) up[j] += 1;
    return IndexBox(k, up);
  }

  std::size_t dim() const noexcept { return lower_.size(); }
  const MultiIndex& lower() const noexcept { return lower_; }
  const MultiIndex& upper() const noexcept { return upper_; }

  /// Side lengths d_j = upper_j - lower_j (may be <= 0 for empty boxes).
  MultiIndex dimensions() const { return upper_ - lower_; }

  std::size_t cardinality() const {
    std::size_t c = 1;
    for (std::size_t j = 0; j < dim(); ++j) {
      Index d = upper_[j] - lower_[j];
      if (d <= 0) return 0;
      c *= static_cast<std::size_t>(d);
    }
    return c;
  }

  bool empty() const { return cardinality() == 0; }

  bool contains(const MultiIndex& k) const {
    lower_.require_same_size(k);
    for (std::size_t j = 0; j < dim(); ++j)
      if (k[j] < lower_[j] || k[j] >= upper_[j]) return false;
    return true;
  }

  /// Visits every index in lexicographic order.
  void for_each(const std::function<void(const MultiIndex&)>& visit) const {
    if (empty()) return;
    MultiIndex k = lower_;
    while (true) {
      visit(k);
      std::size_t j = dim();
      while (j > 0) {
        --j;
        if (++k[j] < upper_[j]) break;
        k[j] = lower_[j];
        if (j == 0) return;
      }
    }
  }

  std::vector<MultiIndex> points() const {
    std::vector<MultiIndex> out;
    out.reserve(cardinality());
    for_each([&](const MultiIndex& k) { out.push_back(k); });
    return out;
  }

  friend bool operator==(const IndexBox&, const IndexBox&) = default;

  std::string to_string() const { return "[" + lower_.to_string() + "," + upper_.to_string() + ")"; }

 private:
  MultiIndex lower_;
  MultiIndex upper_;
};

/// Sub-box with coordinate `axis` (0-based) pinned to upper_axis - 1 - level_from_top.
inline IndexBox box_top_slice(const IndexBox& box, std::size_t axis, Index level_from_top) {
  if (axis >= box.dim())
    throw ConfigError("axis " + std::to_string(axis) + " out of range for box of dimension " +
                      std::to_string(box.dim()));
  const Index extent = box.upper()[axis] - box.lower()[axis];
  if (level_from_top < 0 || level_from_top >= extent) throw ConfigError("slice outside box");
  MultiIndex lo = box.lower();
  MultiIndex hi = box.upper();
  lo[axis] = box.upper()[axis] - 1 - level_from_top;
  hi[axis] = lo[axis] + 1;
  return IndexBox(lo, hi);
}

/// Lattice {k in N^n : k <= max_index}, enumerated lexicographically.
class TruncationLattice {
 public:
  TruncationLattice() = default;
  explicit TruncationLattice(MultiIndex max_index) : max_(std::move(max_index)) {
    if (max_.size() == 0) throw ConfigError("lattice dimension must be at least 1");
    if (!max_.is_natural()) throw ConfigError("lattice bound must lie in N^n: " + max_.to_string());
  }

  std::size_t dim() const noexcept { return max_.size(); }
  const MultiIndex& max_index() const noexcept { return max_; }
  std::size_t size() const { return as_box().cardinality(); }
  bool contains(const MultiIndex& k) const { return k.is_natural() && all_leq(k, max_); }
  void for_each(const std::function<void(const MultiIndex&)>& visit) const { as_box().for_each(visit); }
  std::vector<MultiIndex> points() const { return as_box().points(); }

  IndexBox as_box() const {
    MultiIndex up = max_;
    for (std::size_t j = 0; j < up.size(); ++j) up[j] += 1;
    return IndexBox(MultiIndex(dim(), 0), up);
  }

  friend bool operator==(const TruncationLattice&, const TruncationLattice&) = default;

 private:
  MultiIndex max_;
};

/// Smallest lattice containing L and every translate of L by a prefix sum of
/// `shifts`, clipped to N^n.
inline TruncationLattice shifted_lattice(const TruncationLattice& lattice,
                                         std::span<const MultiIndex> shifts) {
  MultiIndex bound = lattice.max_index();
  MultiIndex prefix(lattice.dim(), 0);
  for (const auto& s : shifts) {
    prefix += s;
    MultiIndex moved = lattice.max_index() + prefix;
    bound = componentwise_max(bound, moved);
  }
  for (std::size_t j = 0; j < bound.size(); ++j) bound[j] = std::max<Index>(bound[j], 0);
  return TruncationLattice(bound);
}

}  // namespace rt
