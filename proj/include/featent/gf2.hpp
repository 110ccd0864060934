#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace featent {

/// Incremental rank of a column set over GF(2).
///
/// Columns are sparse: sorted, duplicate-free row indices. Each added column
/// is reduced against the stored basis by its largest row index (pivot); a
/// column that does not reduce to zero joins the basis and raises the rank.
class Gf2ColumnReducer {
 public:
  /// Returns true when `column` is independent of every column added so far.
  bool add(std::vector<std::uint32_t> column) {
    while (!column.empty()) {
      const std::uint32_t pivot = column.back();
      if (pivot >= owner_.size() || owner_[pivot] < 0) {
        if (pivot >= owner_.size()) owner_.resize(static_cast<std::size_t>(pivot) + 1, -1);
        owner_[pivot] = static_cast<std::int32_t>(basis_.size());
        basis_.push_back(std::move(column));
        return true;
      }
      const auto& other = basis_[static_cast<std::size_t>(owner_[pivot])];
      scratch_.clear();
      std::set_symmetric_difference(column.begin(), column.end(), other.begin(), other.end(),
                                    std::back_inserter(scratch_));
      column.swap(scratch_);
    }
    return false;
  }

  std::size_t rank() const noexcept { return basis_.size(); }

 private:
  std::vector<std::vector<std::uint32_t>> basis_;
  std::vector<std::int32_t> owner_;
  std::vector<std::uint32_t> scratch_;
};

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    size_.assign(n, 1);
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
  }

  std::uint32_t find(std::uint32_t x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns true if the two elements were in different sets.
  bool unite(std::uint32_t a, std::uint32_t b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

}  // namespace featent
