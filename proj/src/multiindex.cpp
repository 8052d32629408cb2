#include "eigenrate/multiindex.hpp"

#include <algorithm>

namespace eigenrate {

MultiIndexSet::MultiIndexSet(int n, std::vector<MultiIndex> members) : n_(n) {
  require(n == 1 || n == 2, "unsupported dimension");
  for (const auto& m : members) insert(m);
}

void MultiIndexSet::insert(const MultiIndex& m) {
  require(m.n == n_, "MultiIndexSet: dimension mismatch");
  auto it = std::lower_bound(members_.begin(), members_.end(), m);
  if (it == members_.end() || !(*it == m)) members_.insert(it, m);
}

bool MultiIndexSet::contains(const MultiIndex& m) const {
  return std::binary_search(members_.begin(), members_.end(), m);
}

bool MultiIndexSet::subset_of(const MultiIndexSet& other) const {
  for (const auto& m : members_)
    if (!other.contains(m)) return false;
  return true;
}

int MultiIndexSet::max_order() const {
  int d = -1;
  for (const auto& m : members_) d = std::max(d, m.order());
  return d;
}

MultiIndexSet enumerate_indices(int n, int r) {
  require(n == 1 || n == 2, "unsupported dimension");
  require(r >= 0, "enumerate_indices: negative degree");
  MultiIndexSet out(n);
  if (n == 1) {
    for (int k = 0; k <= r; ++k) out.insert(MultiIndex(k));
  } else {
    for (int i = 0; i <= r; ++i)
      for (int j = 0; i + j <= r; ++j) out.insert(MultiIndex(i, j));
  }
  return out;
}

MultiIndexSet set_difference(const MultiIndexSet& a, const MultiIndexSet& b) {
  require(a.dim() == b.dim(), "set_difference: dimension mismatch");
  MultiIndexSet out(a.dim());
  for (const auto& m : a.members())
    if (!b.contains(m)) out.insert(m);
  return out;
}

MultiIndexSet set_intersection(const MultiIndexSet& a, const MultiIndexSet& b) {
  require(a.dim() == b.dim(), "set_intersection: dimension mismatch");
  MultiIndexSet out(a.dim());
  for (const auto& m : a.members())
    if (b.contains(m)) out.insert(m);
  return out;
}

IndexSplit index_split(const MultiIndexSet& used) {
  require(!used.empty(), "index_split: empty support");
  const int n = used.dim();
  // The support is finite, so Ind_r escapes it for r large enough; the shell
  // condition Ind_{r-1} subset used must hold at the same r.
  const int rmax = used.max_order() + 1;
  for (int r = 1; r <= rmax; ++r) {
    const MultiIndexSet shell_lo = enumerate_indices(n, r - 1);
    const MultiIndexSet shell = enumerate_indices(n, r);
    if (shell_lo.subset_of(used) && !shell.subset_of(used)) {
      IndexSplit s{r, set_difference(shell, used), set_intersection(shell, used)};
      return s;
    }
  }
  fail("index_split: support does not contain Ind_0 or shell condition never met");
}

}  // namespace eigenrate
