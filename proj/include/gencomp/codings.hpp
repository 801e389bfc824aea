#pragma once

#include <optional>

#include "gencomp/reals.hpp"

namespace gencomp {

/// Exponent of the largest power of 2 dividing n (n >= 1).
unsigned two_adic_valuation(Index n);
/// m with 2^m < n <= 2^{m+1} (n >= 2).
unsigned floor_log2_below(Index n);
bool is_power_of_two(Index n) noexcept;

/// n in R(X) iff bit v(n) of X is set, v the 2-adic valuation. Index 0 is
/// outside the coding (kExcludedIndex).
int encode_R(const RealSpec& x, Index n);

/// Reads bit m of X back off the witnesses n = 2^m (2k+1) <= bound that the
/// description assigns. Every witness found must agree, else
/// kCorruptDescription. nullopt when no witness is assigned.
std::optional<int> decode_R(const GenericDescription& d, unsigned m, Index bound);

/// n in R~(X) iff bit m of X is set, 2^m the largest power of 2 strictly
/// below n; so n = 2^{m+1} still codes bit m. Indices 0 and 1 are excluded.
int encode_Rtilde(const RealSpec& x, Index n);

/// Witnesses for bit m are the n in (2^m, 2^{m+1}] with n <= bound.
std::optional<int> decode_Rtilde(const GenericDescription& d, unsigned m, Index bound);

/// B on the powers of two (2^k carries B(k)), R(A) everywhere else.
int asymmetric_join_bit(const RealSpec& a, const RealSpec& b, Index n);

/// R(X), R~(X) or the asymmetric join of A and B, as a queryable real.
class CodedReal {
 public:
  enum class Kind { kR, kRtilde, kAsymmetricJoin };

  static CodedReal r_of(RealSpec x);
  static CodedReal rtilde_of(RealSpec x);
  static CodedReal asymmetric_join(RealSpec a, RealSpec b);

  Kind kind() const noexcept { return kind_; }
  /// Smallest index in the coding's domain (1 or 2).
  Index first_index() const noexcept { return kind_ == Kind::kRtilde ? 2 : 1; }
  int bit(Index n) const;
  BitSource as_source() const;

  /// The description assigning every index in [first_index, horizon).
  GenericDescription full_description(Index horizon) const;

 private:
  CodedReal(Kind kind, RealSpec a, RealSpec b) : kind_(kind), a_(std::move(a)), b_(std::move(b)) {}

  Kind kind_;
  RealSpec a_;
  RealSpec b_;
};

}  // namespace gencomp
