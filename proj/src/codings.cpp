#include "gencomp/codings.hpp"

#include <bit>

#include "gencomp/error.hpp"

namespace gencomp {

unsigned two_adic_valuation(Index n) {
  if (n == 0) throw Error(ErrorKind::kExcludedIndex, "0 has no largest dividing power of 2");
  return static_cast<unsigned>(std::countr_zero(n));
}

unsigned floor_log2_below(Index n) {
  if (n < 2) throw Error(ErrorKind::kExcludedIndex, "no power of 2 lies below " + std::to_string(n));
  return static_cast<unsigned>(std::bit_width(n - 1) - 1);
}

bool is_power_of_two(Index n) noexcept { return std::has_single_bit(n); }

int encode_R(const RealSpec& x, Index n) { return x.bit(two_adic_valuation(n)); }

namespace {

// Scans candidate witnesses in increasing order; all assigned ones must agree.
template <typename Next>
std::optional<int> agreeing_witness(const GenericDescription& d, Index first, Index bound, Next next,
                                    unsigned m) {
  std::optional<int> found;
  Index found_at = 0;
  for (Index n = first; n <= bound; n = next(n)) {
    if (auto x = d.lookup(n)) {
      if (found && *found != *x) {
        throw Error(ErrorKind::kCorruptDescription,
                    "witnesses " + std::to_string(found_at) + " and " + std::to_string(n) +
                        " disagree on bit " + std::to_string(m));
      }
      if (!found) found_at = n;
      found = x;
    }
    if (next(n) <= n) break;  // overflow
  }
  return found;
}

}  // namespace

std::optional<int> decode_R(const GenericDescription& d, unsigned m, Index bound) {
  if (m > 62) return std::nullopt;
  const Index step = Index{1} << (m + 1);
  return agreeing_witness(d, Index{1} << m, bound, [step](Index n) { return n + step; }, m);
}

int encode_Rtilde(const RealSpec& x, Index n) { return x.bit(floor_log2_below(n)); }

std::optional<int> decode_Rtilde(const GenericDescription& d, unsigned m, Index bound) {
  if (m > 62) return std::nullopt;
  const Index lo = (Index{1} << m) + 1;
  const Index hi = Index{1} << (m + 1);
  return agreeing_witness(d, lo, std::min(bound, hi), [](Index n) { return n + 1; }, m);
}

int asymmetric_join_bit(const RealSpec& a, const RealSpec& b, Index n) {
  if (n == 0) throw Error(ErrorKind::kExcludedIndex, "0 is outside the asymmetric join");
  if (is_power_of_two(n)) return b.bit(static_cast<Index>(std::countr_zero(n)));
  return encode_R(a, n);
}

// ---- CodedReal --------------------------------------------------------------

CodedReal CodedReal::r_of(RealSpec x) { return CodedReal(Kind::kR, x, x); }
CodedReal CodedReal::rtilde_of(RealSpec x) { return CodedReal(Kind::kRtilde, x, x); }
CodedReal CodedReal::asymmetric_join(RealSpec a, RealSpec b) {
  return CodedReal(Kind::kAsymmetricJoin, std::move(a), std::move(b));
}

int CodedReal::bit(Index n) const {
  switch (kind_) {
    case Kind::kR: return encode_R(a_, n);
    case Kind::kRtilde: return encode_Rtilde(a_, n);
    case Kind::kAsymmetricJoin: return asymmetric_join_bit(a_, b_, n);
  }
  return 0;
}

BitSource CodedReal::as_source() const {
  return [self = *this](Index n) { return self.bit(n); };
}

GenericDescription CodedReal::full_description(Index horizon) const {
  const Index first = first_index();
  return GenericDescription::restricted(as_source(),
                                        [first, horizon](Index n) { return n >= first && n < horizon; });
}

}  // namespace gencomp
