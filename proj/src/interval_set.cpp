#include "gencomp/interval_set.hpp"

#include <algorithm>

namespace gencomp {

void IntervalSet::insert(Index lo, Index hi) {
  if (lo >= hi) return;
  // First range whose end reaches lo (adjacent ranges merge).
  auto first = std::lower_bound(ranges_.begin(), ranges_.end(), lo,
                                [](const Range& r, Index v) { return r.second < v; });
  auto last = first;
  while (last != ranges_.end() && last->first <= hi) {
    lo = std::min(lo, last->first);
    hi = std::max(hi, last->second);
    ++last;
  }
  first = ranges_.erase(first, last);
  ranges_.insert(first, {lo, hi});
}

void IntervalSet::insert(const IntervalSet& other) {
  for (const auto& [lo, hi] : other.ranges_) insert(lo, hi);
}

bool IntervalSet::contains(Index n) const { return intersects(n, n + 1); }

bool IntervalSet::intersects(Index lo, Index hi) const { return first_in(lo, hi).has_value(); }

std::optional<Index> IntervalSet::first_in(Index lo, Index hi) const {
  if (lo >= hi) return std::nullopt;
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), lo,
                             [](Index v, const Range& r) { return v < r.second; });
  if (it == ranges_.end()) return std::nullopt;
  const Index candidate = std::max(lo, it->first);
  if (candidate < hi) return candidate;
  return std::nullopt;
}

Index IntervalSet::count_below(Index n) const {
  Index total = 0;
  for (const auto& [lo, hi] : ranges_) {
    if (lo >= n) break;
    total += std::min(hi, n) - lo;
  }
  return total;
}

Index IntervalSet::size() const {
  Index total = 0;
  for (const auto& [lo, hi] : ranges_) total += hi - lo;
  return total;
}

IntervalSet IntervalSet::complement_within(Index lo, Index hi) const {
  IntervalSet out;
  Index cursor = lo;
  for (const auto& [a, b] : ranges_) {
    if (b <= cursor) continue;
    if (a >= hi) break;
    if (a > cursor) out.ranges_.push_back({cursor, std::min(a, hi)});
    cursor = std::max(cursor, b);
    if (cursor >= hi) break;
  }
  if (cursor < hi) out.ranges_.push_back({cursor, hi});
  return out;
}

}  // namespace gencomp
