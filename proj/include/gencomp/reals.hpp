#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gencomp/rational.hpp"

namespace gencomp {

using Index = std::uint64_t;
using Stage = std::uint32_t;

/// A finite binary string: an initial segment of a real, or a tree node.
class BitPrefix {
 public:
  BitPrefix() = default;
  explicit BitPrefix(std::vector<std::uint8_t> bits);

  /// Parses a string over {0,1}; anything else is a kParse error.
  static BitPrefix parse(std::string_view bits);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i]; }
  int at(std::size_t i) const;

  BitPrefix extended(int bit) const;
  BitPrefix prefix(std::size_t len) const;
  bool is_prefix_of(const BitPrefix& other) const noexcept;
  std::size_t common_prefix_length(const BitPrefix& other) const noexcept;

  std::string to_string() const;

  friend auto operator<=>(const BitPrefix&, const BitPrefix&) = default;
  friend bool operator==(const BitPrefix&, const BitPrefix&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// The fixed 64-bit finalizer used by seeded reals (splitmix64's output
/// mixer). bit(n) of seeded(seed) is the top bit of
/// mix64(seed + 0x9E3779B97F4A7C15 * (n + 1)), i.e. the top bit of the
/// (n+1)-th splitmix64 output for that seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// A closed-form infinite binary sequence. Immutable, cheap to copy.
class RealSpec {
 public:
  enum class Kind { kExplicitPrefix, kEventuallyPeriodic, kSeeded };

  static RealSpec explicit_prefix(BitPrefix bits);
  /// Period must be nonempty.
  static RealSpec eventually_periodic(BitPrefix preamble, BitPrefix period);
  static RealSpec seeded(std::uint64_t seed);
  static RealSpec zeros();
  static RealSpec ones();

  Kind kind() const noexcept { return kind_; }
  /// Throws kRange past the hard length of an explicit prefix.
  int bit(Index n) const;
  std::optional<Index> hard_length() const;
  BitPrefix prefix(std::size_t len) const;

  const BitPrefix& preamble() const noexcept { return preamble_; }
  const BitPrefix& period() const noexcept { return period_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::string describe() const;

  friend bool operator==(const RealSpec&, const RealSpec&) = default;

 private:
  RealSpec() = default;

  Kind kind_ = Kind::kEventuallyPeriodic;
  BitPrefix preamble_;  // explicit bits for kExplicitPrefix
  BitPrefix period_;
  std::uint64_t seed_ = 0;
};

int real_bit(const RealSpec& spec, Index n);

/// Anything that answers bit(n); used where reals and coded reals mix.
using BitSource = std::function<int(Index)>;

struct Assignment {
  Index n = 0;
  int x = 0;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// A set of (index, bit) pairs, at most one per index. Either a finite
/// table or a generated lookup; both expose the same decidable query.
class GenericDescription {
 public:
  using Lookup = std::function<std::optional<int>(Index)>;

  GenericDescription();

  /// Duplicate identical pairs are merged; two bits for one index are a
  /// kCorruptDescription error, as is a pair contradicting `source`.
  static GenericDescription from_pairs(std::span<const Assignment> pairs,
                                       std::optional<RealSpec> source = std::nullopt);
  static GenericDescription generated(Lookup lookup,
                                      std::optional<RealSpec> source = std::nullopt);
  /// The description assigning bits(n) exactly on the indices where
  /// `domain(n)` holds.
  static GenericDescription restricted(BitSource bits, std::function<bool(Index)> domain);

  std::optional<int> lookup(Index n) const { return lookup_(n); }
  bool assigned(Index n) const { return lookup_(n).has_value(); }
  const std::optional<RealSpec>& source() const noexcept { return source_; }

  /// All assignments with n < horizon, increasing in n.
  std::vector<Assignment> below(Index horizon) const;

 private:
  Lookup lookup_;
  std::optional<RealSpec> source_;
};

struct DescriptionReport {
  bool truthful = true;
  Rational density{0};
  std::optional<Index> first_conflict;
};

/// Checks every assignment below `horizon` against the source and reports
/// the exact density of the assigned domain below `horizon` (>= 1).
DescriptionReport validate_description(const GenericDescription& d, const RealSpec& source,
                                       Index horizon);
DescriptionReport validate_description(const GenericDescription& d, const BitSource& source,
                                       Index horizon);

struct Triple {
  Index n = 0;
  int x = 0;
  Index label = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// A finite set of labelled assignments <n, x, l>.
class TimeDependentDescription {
 public:
  TimeDependentDescription() = default;
  explicit TimeDependentDescription(std::vector<Triple> triples);

  const std::vector<Triple>& triples() const noexcept { return triples_; }
  /// Drops labels. kCorruptDescription if some n carries both bits.
  GenericDescription project() const;

 private:
  std::vector<Triple> triples_;  // sorted, unique
};

/// A monotone stage-indexed enumeration W_{e,s}. Scripts list what is added
/// at each stage; at(s) is the union of everything added at stages <= s.
class Enumerator {
 public:
  using Additions = std::function<std::vector<Index>(Stage)>;

  Enumerator();
  static Enumerator empty(unsigned tag = 0);
  static Enumerator scripted(unsigned tag, std::map<Stage, std::vector<Index>> script);
  static Enumerator generated(unsigned tag, Additions additions);

  unsigned tag() const noexcept { return tag_; }
  std::set<Index> at(Stage s) const;
  /// Nonnull for scripted enumerators.
  const std::map<Stage, std::set<Index>>* script() const noexcept {
    return additions_ ? nullptr : &script_;
  }

 private:
  unsigned tag_ = 0;
  std::map<Stage, std::set<Index>> script_;
  Additions additions_;
};

std::set<Index> enumerator_at(const Enumerator& w, Stage s);

}  // namespace gencomp
