#pragma once

#include "eigenrate/core.hpp"

#include <vector>

namespace eigenrate {

/// Multi-index (a_1,...,a_n) of non-negative integers, n in {1,2}.
struct MultiIndex {
  int n = 1;
  std::array<int, 2> a{0, 0};

  MultiIndex() = default;
  explicit MultiIndex(int a0) : n(1), a{a0, 0} { require(a0 >= 0, "MultiIndex: negative entry"); }
  MultiIndex(int a0, int a1) : n(2), a{a0, a1} {
    require(a0 >= 0 && a1 >= 0, "MultiIndex: negative entry");
  }

  int order() const { return a[0] + a[1]; }
  int operator[](int i) const { return a[i]; }

  friend bool operator==(const MultiIndex& x, const MultiIndex& y) {
    return x.n == y.n && x.a == y.a;
  }
  friend bool operator<(const MultiIndex& x, const MultiIndex& y) {
    if (x.n != y.n) return x.n < y.n;
    if (x.a[0] != y.a[0]) return x.a[0] < y.a[0];
    return x.a[1] < y.a[1];
  }
};

/// Finite duplicate-free set of multi-indices of a common dimension.
class MultiIndexSet {
 public:
  explicit MultiIndexSet(int n) : n_(n) { require(n == 1 || n == 2, "unsupported dimension"); }
  MultiIndexSet(int n, std::vector<MultiIndex> members);

  int dim() const { return n_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<MultiIndex>& members() const { return members_; }

  void insert(const MultiIndex& m);
  bool contains(const MultiIndex& m) const;
  bool subset_of(const MultiIndexSet& other) const;

  /// Maximum total degree over the members (-1 if empty).
  int max_order() const;

  friend bool operator==(const MultiIndexSet& x, const MultiIndexSet& y) {
    return x.n_ == y.n_ && x.members_ == y.members_;
  }

 private:
  int n_;
  std::vector<MultiIndex> members_;  // kept sorted
};

/// All alpha with |alpha| <= r; cardinality C(n+r, n).
MultiIndexSet enumerate_indices(int n, int r);

/// Set difference a \ b (dimensions must agree).
MultiIndexSet set_difference(const MultiIndexSet& a, const MultiIndexSet& b);

/// Set intersection (dimensions must agree).
MultiIndexSet set_intersection(const MultiIndexSet& a, const MultiIndexSet& b);

/// The split of a monomial-support set against total-degree shells:
/// r is the smallest integer with Ind_{r-1} contained in `used` and Ind_r not
/// contained in `used`; `rest` = Ind_r \ used, `r_used` = Ind_r intersected
/// with `used`.
struct IndexSplit {
  int r = 0;
  MultiIndexSet rest;
  MultiIndexSet r_used;
};

IndexSplit index_split(const MultiIndexSet& used);

}  // namespace eigenrate
