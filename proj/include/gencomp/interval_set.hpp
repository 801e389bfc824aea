#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gencomp/reals.hpp"

namespace gencomp {

/// A set of naturals stored as sorted, disjoint, non-adjacent half-open
/// ranges [lo, hi). Enumerations in the diagonal engine are mostly unions
/// of whole block prefixes, so this stays tiny where a std::set would not.
class IntervalSet {
 public:
  using Range = std::pair<Index, Index>;

  IntervalSet() = default;

  void insert(Index n) { insert(n, n + 1); }
  void insert(Index lo, Index hi);
  void insert(const IntervalSet& other);

  bool contains(Index n) const;
  /// True iff some member lies in [lo, hi).
  bool intersects(Index lo, Index hi) const;
  /// Smallest member in [lo, hi), if any.
  std::optional<Index> first_in(Index lo, Index hi) const;
  /// Number of members below n.
  Index count_below(Index n) const;
  Index size() const;
  bool empty() const noexcept { return ranges_.empty(); }

  /// Members of [lo, hi) that are not in this set.
  IntervalSet complement_within(Index lo, Index hi) const;

  const std::vector<Range>& ranges() const noexcept { return ranges_; }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Range> ranges_;
};

}  // namespace gencomp
