#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "gencomp/reals.hpp"

namespace gencomp {

/// A reflexive binary relation on {0, ..., size-1}; related(a, b) reads a R b.
class FiniteReflexiveRelation {
 public:
  /// The identity relation.
  explicit FiniteReflexiveRelation(std::size_t size);
  /// Square, reflexive adjacency; anything else is kParse.
  explicit FiniteReflexiveRelation(std::vector<std::vector<bool>> adjacency);

  /// Each off-diagonal pair independently related with probability 1/2.
  static FiniteReflexiveRelation random(std::size_t size, std::mt19937_64& rng);

  std::size_t size() const noexcept { return adjacency_.size(); }
  bool related(std::size_t a, std::size_t b) const;
  const std::vector<std::vector<bool>>& adjacency() const noexcept { return adjacency_; }

 private:
  std::vector<std::vector<bool>> adjacency_;
};

struct IdInterval {
  Index lo = 0;
  Index hi = 0;  // exclusive

  Index size() const noexcept { return hi - lo; }
  bool contains(Index id) const noexcept { return lo <= id && id < hi; }
};

/// An element of the universal relation, named by the stage that added it
/// and its extension combo. Stage s+1 adds 4^{n_s} elements (n_s the domain
/// size after stage s); the new element with combo index c relates to old
/// element o through base-4 digit number o of c (digit position = o's id):
/// bit 0 of the digit is o R new, bit 1 is new R o. Elements are ordered as
/// their numeric ids (stage, then combo index).
///
/// Numeric ids exist only through stage 3 (stage 3 already covers every
/// uint64 id >= 1029); later stages are symbolic.
class UniversalElement {
 public:
  /// Element 0, the stage-0 domain.
  UniversalElement();

  /// Stage-`stage` element whose nonzero combo digits are keyed by older
  /// elements. Olders must be distinct, with stage < `stage`, digits 1..3.
  static UniversalElement added_at(unsigned stage, std::vector<UniversalElement> olders,
                                   std::vector<std::uint8_t> digits);
  /// kCapacity past the representable range.
  static UniversalElement from_id(Index id);

  unsigned stage() const noexcept { return stage_; }
  /// The numeric id, when it fits in 64 bits.
  std::optional<Index> id() const;
  /// Digit for an older element (0 when absent).
  int digit_for(const UniversalElement& older) const;

  std::string to_string() const;

  friend std::strong_ordering operator<=>(const UniversalElement& a, const UniversalElement& b);
  friend bool operator==(const UniversalElement& a, const UniversalElement& b);

 private:
  unsigned stage_ = 0;
  std::vector<UniversalElement> olders_;  // ascending
  std::vector<std::uint8_t> digits_;
};

bool universal_rel(const UniversalElement& a, const UniversalElement& b);

/// Numeric view of the staged construction. `max_stage` caps which stages
/// may be addressed by id (at most 3, the last one with 64-bit ids).
class UniversalRelation {
 public:
  explicit UniversalRelation(unsigned max_stage = 3);

  unsigned max_stage() const noexcept { return max_stage_; }
  /// Stage 0 is {0}; stage s+1 is the next 4^{n_s} ids. kCapacity when the
  /// interval does not fit in 64 bits or s > max_stage.
  IdInterval stage_interval(unsigned s) const;
  /// Domain size after stage s (kCapacity when unrepresentable).
  Index domain_size(unsigned s) const;
  unsigned stage_of(Index id) const;
  bool related(Index i, Index j) const;

 private:
  unsigned max_stage_;
};

IdInterval stage_interval(unsigned s);
bool universal_rel(Index i, Index j);

/// a_i maps to an element added at stage i.
struct Embedding {
  std::vector<UniversalElement> images;
};

/// Builds the embedding and checks preservation and reflection on every
/// pair (kInternalConsistency otherwise). Sizes above `max_size` are
/// kCapacity: symbolic elements grow as 2^size.
Embedding embed_relation(const FiniteReflexiveRelation& r, std::size_t max_size = 16);

/// Diagonal pairing <m, j> = (m+j)(m+j+1)/2 + j.
Index cantor_pair(Index m, Index j);
std::pair<Index, Index> cantor_unpair(Index k);

/// Y_i(k) = [k = <m, j>, j related from i] * X_j(m).
int y_family_bit(const FiniteReflexiveRelation& rel, std::span<const RealSpec> reals, std::size_t i,
                 Index k);
/// Z_i = asymmetric join of X_i and Y_i.
int z_family_bit(const FiniteReflexiveRelation& rel, std::span<const RealSpec> reals, std::size_t i,
                 Index n);

}  // namespace gencomp
