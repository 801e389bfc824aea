#include "gencomp/density.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "gencomp/error.hpp"

namespace gencomp {

Block block_of(unsigned i) {
  if (i > 62) throw Error(ErrorKind::kRange, "block index " + std::to_string(i) + " exceeds 62");
  const Index lo = Index{1} << i;
  return Block{i, lo, 2 * lo};
}

unsigned block_index(Index n) {
  if (n == 0) throw Error(ErrorKind::kExcludedIndex, "0 lies in no block");
  return static_cast<unsigned>(std::bit_width(n) - 1);
}

Rational prefix_density(const Membership& member, Index n) {
  if (n == 0) throw Error(ErrorKind::kUndefinedInput, "density of the empty prefix");
  std::int64_t count = 0;
  for (Index k = 0; k < n; ++k) count += member(k) ? 1 : 0;
  return Rational(count, static_cast<std::int64_t>(n));
}

// ---- GapCensus --------------------------------------------------------------

GapCensus::GapCensus(unsigned i_max, std::vector<std::optional<unsigned>> max_gaps,
                     std::vector<Index> omitted)
    : i_max_(i_max), max_gaps_(std::move(max_gaps)), omitted_(std::move(omitted)) {
  if (max_gaps_.size() != i_max_) {
    throw Error(ErrorKind::kInternalConsistency, "census must hold one record per block");
  }
  for (unsigned i = 0; i < i_max_; ++i) {
    if (max_gaps_[i] && *max_gaps_[i] > i) {
      throw Error(ErrorKind::kMalformedGap, "gap exponent exceeds block index");
    }
  }
  std::sort(omitted_.begin(), omitted_.end());
}

std::optional<unsigned> GapCensus::max_gap(unsigned i) const {
  if (i >= i_max_) throw Error(ErrorKind::kInsufficientData, "block beyond census bound");
  return max_gaps_[i];
}

bool GapCensus::has_gap(unsigned i, unsigned e) const {
  auto g = max_gap(i);
  return g && *g <= e && e <= i;
}

bool GapCensus::member(Index n) const {
  if (n >= horizon()) throw Error(ErrorKind::kInsufficientData, "membership beyond census horizon");
  return !std::binary_search(omitted_.begin(), omitted_.end(), n);
}

GapCensus gap_census(const Membership& member, unsigned i_max) {
  if (i_max > 40) throw Error(ErrorKind::kBudget, "census bound above 2^40 elements");
  std::vector<Index> omitted;
  const Index horizon = Index{1} << i_max;
  for (Index n = 0; n < horizon; ++n) {
    if (!member(n)) omitted.push_back(n);
  }
  std::vector<std::optional<unsigned>> gaps(i_max);
  for (unsigned i = 0; i < i_max; ++i) {
    const Block b = block_of(i);
    // Length of the absent suffix of P_i, read off the sorted omissions.
    Index run = 0;
    auto it = std::lower_bound(omitted.begin(), omitted.end(), b.hi);
    while (it != omitted.begin() && *(it - 1) == b.hi - 1 - run && *(it - 1) >= b.lo) {
      ++run;
      --it;
    }
    if (run > 0) gaps[i] = i - static_cast<unsigned>(std::bit_width(run) - 1);
  }
  return GapCensus(i_max, std::move(gaps), std::move(omitted));
}

std::optional<Index> density_threshold(const GapCensus& census, unsigned e, Index n_max) {
  if (n_max == 0) throw Error(ErrorKind::kUndefinedInput, "threshold horizon must be >= 1");
  if (n_max > census.horizon()) {
    throw Error(ErrorKind::kInsufficientData, "census horizon " + std::to_string(census.horizon()) +
                                                  " < " + std::to_string(n_max));
  }
  // Compare count/n >= 1 - 2^{1-e} as exact rationals.
  const Rational bound = one_minus_pow2_neg(static_cast<int>(e) - 1);
  std::vector<bool> ok(n_max + 1, false);
  std::int64_t count = 0;
  for (Index n = 1; n <= n_max; ++n) {
    count += census.member(n - 1) ? 1 : 0;
    ok[n] = Rational(count, static_cast<std::int64_t>(n)) >= bound;
  }
  if (!ok[n_max]) return std::nullopt;
  Index n0 = n_max;
  while (n0 > 1 && ok[n0 - 1]) --n0;
  return n0;
}

Rational gap_density_upper(unsigned i, unsigned e) {
  if (e > i) {
    throw Error(ErrorKind::kMalformedGap, "gap exponent " + std::to_string(e) + " > block index " +
                                              std::to_string(i));
  }
  return one_minus_pow2_neg(static_cast<int>(e) + 1);
}

DensityProfile density_profile(const Membership& member, Index horizon, std::span<const Index> at) {
  if (horizon == 0) throw Error(ErrorKind::kUndefinedInput, "profile horizon must be >= 1");
  std::vector<Index> wanted(at.begin(), at.end());
  std::sort(wanted.begin(), wanted.end());
  if (!wanted.empty() && (wanted.front() == 0 || wanted.back() > horizon)) {
    throw Error(ErrorKind::kUndefinedInput, "profile points must lie in [1, horizon]");
  }
  DensityProfile profile{horizon, {}};
  std::int64_t count = 0;
  auto next = wanted.begin();
  for (Index n = 1; n <= horizon; ++n) {
    count += member(n - 1) ? 1 : 0;
    if (wanted.empty()) {
      profile.values.emplace(n, Rational(count, static_cast<std::int64_t>(n)));
    } else {
      while (next != wanted.end() && *next == n) {
        profile.values.emplace(n, Rational(count, static_cast<std::int64_t>(n)));
        ++next;
      }
      if (next == wanted.end()) break;
    }
  }
  return profile;
}

IntervalSet gap_only_set(std::span<const std::optional<unsigned>> gaps) {
  if (gaps.size() > 62) throw Error(ErrorKind::kBudget, "gap pattern beyond 2^62");
  IntervalSet out;
  out.insert(0, 1);
  for (unsigned i = 0; i < gaps.size(); ++i) {
    const Block b = block_of(i);
    if (!gaps[i]) {
      out.insert(b.lo, b.hi);
      continue;
    }
    if (*gaps[i] > i) throw Error(ErrorKind::kMalformedGap, "gap exponent above block index " + std::to_string(i));
    out.insert(b.lo, b.gap_start(*gaps[i]));
  }
  return out;
}

std::vector<std::optional<unsigned>> random_gap_pattern(std::mt19937_64& rng, unsigned i_max) {
  std::vector<std::optional<unsigned>> gaps(i_max);
  for (unsigned i = 0; i < i_max; ++i) {
    if (rng() & 1) gaps[i] = static_cast<unsigned>(rng() % (i + 1));
  }
  return gaps;
}

std::string to_csv(const DensityProfile& profile) {
  std::ostringstream out;
  out << "n,num,den\n";
  for (const auto& [n, r] : profile.values) out << n << ',' << r.numerator() << ',' << r.denominator() << '\n';
  return out.str();
}

}  // namespace gencomp
