#include "gencomp/relations.hpp"

#include <algorithm>
#include <bit>

#include "gencomp/codings.hpp"
#include "gencomp/error.hpp"

namespace gencomp {

// ---- FiniteReflexiveRelation -------------------------------------------------

FiniteReflexiveRelation::FiniteReflexiveRelation(std::size_t size)
    : adjacency_(size, std::vector<bool>(size, false)) {
  for (std::size_t a = 0; a < size; ++a) adjacency_[a][a] = true;
}

FiniteReflexiveRelation::FiniteReflexiveRelation(std::vector<std::vector<bool>> adjacency)
    : adjacency_(std::move(adjacency)) {
  for (std::size_t a = 0; a < adjacency_.size(); ++a) {
    if (adjacency_[a].size() != adjacency_.size()) throw Error(ErrorKind::kParse, "relation table is not square");
    if (!adjacency_[a][a]) throw Error(ErrorKind::kParse, "relation is not reflexive at " + std::to_string(a));
  }
}

FiniteReflexiveRelation FiniteReflexiveRelation::random(std::size_t size, std::mt19937_64& rng) {
  FiniteReflexiveRelation r(size);
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = 0; b < size; ++b) {
      if (a != b) r.adjacency_[a][b] = (rng() & 1) != 0;
    }
  }
  return r;
}

bool FiniteReflexiveRelation::related(std::size_t a, std::size_t b) const {
  if (a >= size() || b >= size()) throw Error(ErrorKind::kRange, "relation element out of range");
  return adjacency_[a][b];
}

// ---- staged domain arithmetic ----------------------------------------------

namespace {

constexpr Index kStageLo[] = {0, 1, 5, 1029};  // first id of stages 0..3

int digit_of(Index combo, Index position) {
  if (position >= 32) return 0;
  return static_cast<int>((combo >> (2 * position)) & 3U);
}

bool add_overflows(Index a, Index b, Index& out) { return __builtin_add_overflow(a, b, &out); }

}  // namespace

UniversalRelation::UniversalRelation(unsigned max_stage) : max_stage_(max_stage) {
  if (max_stage > 3) {
    throw Error(ErrorKind::kCapacity, "stages beyond 3 have no 64-bit ids");
  }
}

Index UniversalRelation::domain_size(unsigned s) const {
  if (s >= 3) throw Error(ErrorKind::kCapacity, "domain after stage " + std::to_string(s) + " exceeds 2^64");
  return kStageLo[s + 1];
}

IdInterval UniversalRelation::stage_interval(unsigned s) const {
  if (s > max_stage_) {
    throw Error(ErrorKind::kCapacity, "stage " + std::to_string(s) + " above configured cap " +
                                          std::to_string(max_stage_));
  }
  if (s == 0) return {0, 1};
  if (s >= 3) throw Error(ErrorKind::kCapacity, "stage " + std::to_string(s) + " has 4^1029 or more elements");
  return {kStageLo[s], kStageLo[s + 1]};
}

unsigned UniversalRelation::stage_of(Index id) const {
  unsigned s = 0;
  if (id >= kStageLo[3]) s = 3;
  else if (id >= kStageLo[2]) s = 2;
  else if (id >= kStageLo[1]) s = 1;
  if (s > max_stage_) {
    throw Error(ErrorKind::kCapacity, "id " + std::to_string(id) + " lies in stage " + std::to_string(s) +
                                          " above the cap");
  }
  return s;
}

bool UniversalRelation::related(Index i, Index j) const {
  const unsigned si = stage_of(i);
  const unsigned sj = stage_of(j);
  if (i == j) return true;
  if (si == sj) return false;
  if (si < sj) return (digit_of(j - kStageLo[sj], i) & 1) != 0;   // old i, new j: i R j
  return (digit_of(i - kStageLo[si], j) & 2) != 0;                // new i, old j: i R j
}

IdInterval stage_interval(unsigned s) { return UniversalRelation().stage_interval(s); }
bool universal_rel(Index i, Index j) { return UniversalRelation().related(i, j); }

// ---- UniversalElement -------------------------------------------------------

UniversalElement::UniversalElement() = default;

UniversalElement UniversalElement::added_at(unsigned stage, std::vector<UniversalElement> olders,
                                            std::vector<std::uint8_t> digits) {
  if (olders.size() != digits.size()) throw Error(ErrorKind::kInternalConsistency, "digit count mismatch");
  if (stage == 0 && !olders.empty()) throw Error(ErrorKind::kInternalConsistency, "stage 0 has no combos");
  std::vector<std::size_t> order(olders.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return olders[a] < olders[b]; });
  UniversalElement e;
  e.stage_ = stage;
  for (std::size_t k : order) {
    if (olders[k].stage() >= stage) throw Error(ErrorKind::kInternalConsistency, "combo digit on a non-older element");
    if (digits[k] > 3) throw Error(ErrorKind::kInternalConsistency, "combo digit above 3");
    if (!e.olders_.empty() && e.olders_.back() == olders[k]) {
      throw Error(ErrorKind::kInternalConsistency, "repeated combo position");
    }
    if (digits[k] == 0) continue;
    e.olders_.push_back(olders[k]);
    e.digits_.push_back(digits[k]);
  }
  return e;
}

UniversalElement UniversalElement::from_id(Index id) {
  const unsigned s = UniversalRelation().stage_of(id);
  if (s == 0) return {};
  const Index combo = id - kStageLo[s];
  std::vector<UniversalElement> olders;
  std::vector<std::uint8_t> digits;
  for (Index pos = 0; pos < 32; ++pos) {
    if (int d = digit_of(combo, pos)) {
      olders.push_back(from_id(pos));
      digits.push_back(static_cast<std::uint8_t>(d));
    }
  }
  return added_at(s, std::move(olders), std::move(digits));
}

std::optional<Index> UniversalElement::id() const {
  if (stage_ == 0) return Index{0};
  if (stage_ > 3) return std::nullopt;
  Index total = kStageLo[stage_];
  for (std::size_t k = 0; k < olders_.size(); ++k) {
    auto pos = olders_[k].id();
    if (!pos || *pos >= 32) return std::nullopt;
    if (add_overflows(total, Index{digits_[k]} << (2 * *pos), total)) return std::nullopt;
  }
  return total;
}

int UniversalElement::digit_for(const UniversalElement& older) const {
  auto it = std::lower_bound(olders_.begin(), olders_.end(), older);
  if (it == olders_.end() || !(*it == older)) return 0;
  return digits_[static_cast<std::size_t>(it - olders_.begin())];
}

std::string UniversalElement::to_string() const {
  if (auto n = id()) return std::to_string(*n);
  std::string s = "s" + std::to_string(stage_) + "[";
  for (std::size_t k = 0; k < olders_.size(); ++k) {
    if (k) s += ",";
    s += olders_[k].to_string() + ":" + std::to_string(digits_[k]);
  }
  return s + "]";
}

std::strong_ordering operator<=>(const UniversalElement& a, const UniversalElement& b) {
  if (auto c = a.stage_ <=> b.stage_; c != 0) return c;
  // Same stage: compare combo indices, most significant digit position first.
  auto ia = a.olders_.size();
  auto ib = b.olders_.size();
  while (ia > 0 && ib > 0) {
    const auto& pa = a.olders_[ia - 1];
    const auto& pb = b.olders_[ib - 1];
    if (auto c = pa <=> pb; c != 0) return c;  // the higher position has a nonzero digit
    if (auto c = a.digits_[ia - 1] <=> b.digits_[ib - 1]; c != 0) return c;
    --ia;
    --ib;
  }
  return ia <=> ib;
}

bool operator==(const UniversalElement& a, const UniversalElement& b) { return (a <=> b) == 0; }

bool universal_rel(const UniversalElement& a, const UniversalElement& b) {
  if (a == b) return true;
  if (a.stage() == b.stage()) return false;
  if (a.stage() < b.stage()) return (b.digit_for(a) & 1) != 0;
  return (a.digit_for(b) & 2) != 0;
}

// ---- embedding --------------------------------------------------------------

Embedding embed_relation(const FiniteReflexiveRelation& r, std::size_t max_size) {
  if (r.size() > max_size) {
    throw Error(ErrorKind::kCapacity, "relation of size " + std::to_string(r.size()) + " above embedding cap " +
                                          std::to_string(max_size));
  }
  Embedding emb;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i == 0) {
      emb.images.emplace_back();
      continue;
    }
    std::vector<std::uint8_t> digits;
    for (std::size_t j = 0; j < i; ++j) {
      digits.push_back(static_cast<std::uint8_t>((r.related(j, i) ? 1 : 0) | (r.related(i, j) ? 2 : 0)));
    }
    emb.images.push_back(UniversalElement::added_at(static_cast<unsigned>(i), emb.images, std::move(digits)));
  }
  for (std::size_t a = 0; a < r.size(); ++a) {
    if (emb.images[a].stage() != a) throw Error(ErrorKind::kInternalConsistency, "image drawn from wrong stage");
    for (std::size_t b = 0; b < r.size(); ++b) {
      if (universal_rel(emb.images[a], emb.images[b]) != r.related(a, b)) {
        throw Error(ErrorKind::kInternalConsistency, "embedding fails on (" + std::to_string(a) + "," +
                                                         std::to_string(b) + ")");
      }
    }
  }
  return emb;
}

// ---- Y_i / Z_i families -----------------------------------------------------

Index cantor_pair(Index m, Index j) {
  const Index s = m + j;
  return s * (s + 1) / 2 + j;
}

std::pair<Index, Index> cantor_unpair(Index k) {
  // Largest s with s(s+1)/2 <= k.
  Index s = 0;
  Index lo = 0, hi = Index{1} << 33;
  while (lo <= hi) {
    const Index mid = lo + (hi - lo) / 2;
    if (mid * (mid + 1) / 2 <= k) {
      s = mid;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  const Index j = k - s * (s + 1) / 2;
  return {s - j, j};
}

namespace {

void check_family(const FiniteReflexiveRelation& rel, std::span<const RealSpec> reals, std::size_t i) {
  if (reals.size() < rel.size()) throw Error(ErrorKind::kRange, "one real per relation member is required");
  if (i >= rel.size()) throw Error(ErrorKind::kRange, "member " + std::to_string(i) + " outside the relation");
}

}  // namespace

int y_family_bit(const FiniteReflexiveRelation& rel, std::span<const RealSpec> reals, std::size_t i,
                 Index k) {
  check_family(rel, reals, i);
  const auto [m, j] = cantor_unpair(k);
  if (j >= rel.size() || !rel.related(i, static_cast<std::size_t>(j))) return 0;
  return reals[static_cast<std::size_t>(j)].bit(m);
}

int z_family_bit(const FiniteReflexiveRelation& rel, std::span<const RealSpec> reals, std::size_t i,
                 Index n) {
  check_family(rel, reals, i);
  if (n == 0) throw Error(ErrorKind::kExcludedIndex, "0 is outside the asymmetric join");
  if (is_power_of_two(n)) return y_family_bit(rel, reals, i, static_cast<Index>(std::countr_zero(n)));
  return encode_R(reals[i], n);
}

}  // namespace gencomp
