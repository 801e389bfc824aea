#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gencomp/interval_set.hpp"
#include "gencomp/rational.hpp"
#include "gencomp/reals.hpp"

namespace gencomp {

/// Decidable membership, queried only below some horizon.
using Membership = std::function<bool(Index)>;

/// P_i = [2^i, 2^{i+1}). The blocks partition the positive naturals.
struct Block {
  unsigned index = 0;
  Index lo = 1;
  Index hi = 2;  // exclusive

  Index size() const noexcept { return hi - lo; }
  bool contains(Index n) const noexcept { return lo <= n && n < hi; }
  /// First element of the trailing 2^{index-e} elements.
  Index gap_start(unsigned e) const noexcept { return hi - (Index{1} << (index - e)); }
};

/// Valid for i <= 62.
Block block_of(unsigned i);
/// The i with n in P_i; n must be >= 1.
unsigned block_index(Index n);

/// |{k < n : member(k)}| / n. n = 0 is kUndefinedInput.
Rational prefix_density(const Membership& member, Index n);

/// Maximal gap per block: one number per block, since gaps at a block nest
/// (a gap of size 2^{-e} implies gaps of every size 2^{-e'}, e <= e' <= i).
class GapCensus {
 public:
  GapCensus(unsigned i_max, std::vector<std::optional<unsigned>> max_gaps,
            std::vector<Index> omitted);

  unsigned i_max() const noexcept { return i_max_; }
  /// Membership is known for every n below this (2^{i_max}).
  Index horizon() const noexcept { return Index{1} << i_max_; }

  /// Smallest e with a gap of size 2^{-e} at P_i, if any.
  std::optional<unsigned> max_gap(unsigned i) const;
  bool has_gap(unsigned i, unsigned e) const;
  const std::vector<std::optional<unsigned>>& max_gaps() const noexcept { return max_gaps_; }

  /// Sorted omitted elements below the horizon.
  const std::vector<Index>& omitted() const noexcept { return omitted_; }
  bool member(Index n) const;

  friend bool operator==(const GapCensus&, const GapCensus&) = default;

 private:
  unsigned i_max_;
  std::vector<std::optional<unsigned>> max_gaps_;
  std::vector<Index> omitted_;
};

/// Scans blocks P_0 .. P_{i_max-1}.
GapCensus gap_census(const Membership& member, unsigned i_max);

/// Least n0 <= n_max such that every n in [n0, n_max] has prefix density at
/// least 1 - 2^{-e+1}, found by exact scan; nullopt when the bound fails at
/// n_max itself. kInsufficientData when n_max exceeds the census horizon.
std::optional<Index> density_threshold(const GapCensus& census, unsigned e, Index n_max);

/// 1 - 2^{-e-1}: the prefix density at 2^{i+1} of any set with a gap of
/// size 2^{-e} at P_i is at most this. kMalformedGap when e > i.
Rational gap_density_upper(unsigned i, unsigned e);

struct DensityProfile {
  Index horizon = 0;
  std::map<Index, Rational> values;
};

/// Exact |X|n|/n for each n in `at` (all of 1..horizon when `at` is empty).
DensityProfile density_profile(const Membership& member, Index horizon,
                               std::span<const Index> at = {});

/// Everything below 2^{gaps.size()} except the chosen gaps: gaps[i] = e
/// removes the last 2^{i-e} elements of P_i. 0 is a member.
IntervalSet gap_only_set(std::span<const std::optional<unsigned>> gaps);

/// Each P_i, i < i_max, gets a gap with probability 1/2, e uniform on [0, i].
std::vector<std::optional<unsigned>> random_gap_pattern(std::mt19937_64& rng, unsigned i_max);

/// "n,num,den" lines with a header row.
std::string to_csv(const DensityProfile& profile);

}  // namespace gencomp
