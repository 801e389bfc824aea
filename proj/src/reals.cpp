#include "gencomp/reals.hpp"

#include <algorithm>
#include <memory>
#include <unordered_map>

#include "gencomp/error.hpp"

namespace gencomp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kUndefinedInput: return "undefined input";
    case ErrorKind::kExcludedIndex: return "excluded index";
    case ErrorKind::kMalformedGap: return "malformed gap";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kCorruptDescription: return "corrupt description";
    case ErrorKind::kCapacity: return "capacity error";
    case ErrorKind::kInternalConsistency: return "internal consistency error";
    case ErrorKind::kInsufficientOracle: return "insufficient oracle";
    case ErrorKind::kFalsifiedPremise: return "falsified premise";
    case ErrorKind::kBudget: return "budget exceeded";
    case ErrorKind::kUndefinedRegion: return "undefined region";
    case ErrorKind::kCap: return "marker cap exceeded";
    case ErrorKind::kSelector: return "selector contract violation";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kInvariantViolation: return "invariant violation";
  }
  return "error";
}

// ---- BitPrefix --------------------------------------------------------------

BitPrefix::BitPrefix(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw Error(ErrorKind::kParse, "bit prefix entries must be 0 or 1");
  }
}

BitPrefix BitPrefix::parse(std::string_view bits) {
  std::vector<std::uint8_t> out;
  out.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw Error(ErrorKind::kParse, "bit string '" + std::string(bits) + "' has a non-binary digit");
    }
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return BitPrefix(std::move(out));
}

int BitPrefix::at(std::size_t i) const {
  if (i >= bits_.size()) {
    throw Error(ErrorKind::kRange, "bit " + std::to_string(i) + " of a prefix of length " +
                                       std::to_string(bits_.size()));
  }
  return bits_[i];
}

BitPrefix BitPrefix::extended(int bit) const {
  auto bits = bits_;
  bits.push_back(static_cast<std::uint8_t>(bit != 0));
  return BitPrefix(std::move(bits));
}

BitPrefix BitPrefix::prefix(std::size_t len) const {
  len = std::min(len, bits_.size());
  return BitPrefix(std::vector<std::uint8_t>(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(len)));
}

bool BitPrefix::is_prefix_of(const BitPrefix& other) const noexcept {
  return bits_.size() <= other.bits_.size() &&
         std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
}

std::size_t BitPrefix::common_prefix_length(const BitPrefix& other) const noexcept {
  const auto n = std::min(bits_.size(), other.bits_.size());
  std::size_t i = 0;
  while (i < n && bits_[i] == other.bits_[i]) ++i;
  return i;
}

std::string BitPrefix::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

// ---- RealSpec ---------------------------------------------------------------

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RealSpec RealSpec::explicit_prefix(BitPrefix bits) {
  RealSpec r;
  r.kind_ = Kind::kExplicitPrefix;
  r.preamble_ = std::move(bits);
  return r;
}

RealSpec RealSpec::eventually_periodic(BitPrefix preamble, BitPrefix period) {
  if (period.empty()) throw Error(ErrorKind::kParse, "eventually-periodic real needs a nonempty period");
  RealSpec r;
  r.kind_ = Kind::kEventuallyPeriodic;
  r.preamble_ = std::move(preamble);
  r.period_ = std::move(period);
  return r;
}

RealSpec RealSpec::seeded(std::uint64_t seed) {
  RealSpec r;
  r.kind_ = Kind::kSeeded;
  r.seed_ = seed;
  return r;
}

RealSpec RealSpec::zeros() { return eventually_periodic({}, BitPrefix::parse("0")); }
RealSpec RealSpec::ones() { return eventually_periodic({}, BitPrefix::parse("1")); }

int RealSpec::bit(Index n) const {
  switch (kind_) {
    case Kind::kExplicitPrefix:
      if (n >= preamble_.size()) {
        throw Error(ErrorKind::kRange, "bit " + std::to_string(n) + " of an explicit prefix of length " +
                                           std::to_string(preamble_.size()));
      }
      return preamble_[n];
    case Kind::kEventuallyPeriodic:
      if (n < preamble_.size()) return preamble_[n];
      return period_[(n - preamble_.size()) % period_.size()];
    case Kind::kSeeded:
      return static_cast<int>(mix64(seed_ + 0x9E3779B97F4A7C15ULL * (n + 1)) >> 63);
  }
  return 0;
}

std::optional<Index> RealSpec::hard_length() const {
  if (kind_ == Kind::kExplicitPrefix) return preamble_.size();
  return std::nullopt;
}

BitPrefix RealSpec::prefix(std::size_t len) const {
  std::vector<std::uint8_t> bits(len);
  for (std::size_t i = 0; i < len; ++i) bits[i] = static_cast<std::uint8_t>(bit(i));
  return BitPrefix(std::move(bits));
}

std::string RealSpec::describe() const {
  switch (kind_) {
    case Kind::kExplicitPrefix: return "explicit(" + preamble_.to_string() + ")";
    case Kind::kEventuallyPeriodic:
      return "periodic(" + preamble_.to_string() + ";" + period_.to_string() + ")";
    case Kind::kSeeded: return "seeded(" + std::to_string(seed_) + ")";
  }
  return "?";
}

int real_bit(const RealSpec& spec, Index n) { return spec.bit(n); }

// ---- GenericDescription -----------------------------------------------------

GenericDescription::GenericDescription()
    : lookup_([](Index) -> std::optional<int> { return std::nullopt; }) {}

GenericDescription GenericDescription::from_pairs(std::span<const Assignment> pairs,
                                                  std::optional<RealSpec> source) {
  auto table = std::make_shared<std::unordered_map<Index, int>>();
  for (const auto& a : pairs) {
    if (a.x != 0 && a.x != 1) throw Error(ErrorKind::kCorruptDescription, "assigned value is not a bit");
    auto [it, inserted] = table->emplace(a.n, a.x);
    if (!inserted && it->second != a.x) {
      throw Error(ErrorKind::kCorruptDescription, "index " + std::to_string(a.n) + " assigned both bits");
    }
    if (source && source->bit(a.n) != a.x) {
      throw Error(ErrorKind::kCorruptDescription,
                  "index " + std::to_string(a.n) + " contradicts the attached source");
    }
  }
  GenericDescription d;
  d.lookup_ = [table](Index n) -> std::optional<int> {
    auto it = table->find(n);
    if (it == table->end()) return std::nullopt;
    return it->second;
  };
  d.source_ = std::move(source);
  return d;
}

GenericDescription GenericDescription::generated(Lookup lookup, std::optional<RealSpec> source) {
  GenericDescription d;
  d.lookup_ = std::move(lookup);
  d.source_ = std::move(source);
  return d;
}

GenericDescription GenericDescription::restricted(BitSource bits, std::function<bool(Index)> domain) {
  return generated([bits = std::move(bits), domain = std::move(domain)](Index n) -> std::optional<int> {
    if (!domain(n)) return std::nullopt;
    return bits(n);
  });
}

std::vector<Assignment> GenericDescription::below(Index horizon) const {
  std::vector<Assignment> out;
  for (Index n = 0; n < horizon; ++n) {
    if (auto x = lookup_(n)) out.push_back({n, *x});
  }
  return out;
}

DescriptionReport validate_description(const GenericDescription& d, const BitSource& source,
                                       Index horizon) {
  if (horizon == 0) throw Error(ErrorKind::kUndefinedInput, "validation horizon must be >= 1");
  DescriptionReport report;
  std::int64_t assigned = 0;
  for (Index n = 0; n < horizon; ++n) {
    auto x = d.lookup(n);
    if (!x) continue;
    ++assigned;
    if (report.truthful && *x != source(n)) {
      report.truthful = false;
      report.first_conflict = n;
    }
  }
  report.density = Rational(assigned, static_cast<std::int64_t>(horizon));
  return report;
}

DescriptionReport validate_description(const GenericDescription& d, const RealSpec& source,
                                       Index horizon) {
  return validate_description(d, BitSource([&source](Index n) { return source.bit(n); }), horizon);
}

// ---- TimeDependentDescription ------------------------------------------------

TimeDependentDescription::TimeDependentDescription(std::vector<Triple> triples)
    : triples_(std::move(triples)) {
  for (const auto& t : triples_) {
    if (t.x != 0 && t.x != 1) throw Error(ErrorKind::kCorruptDescription, "triple value is not a bit");
  }
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
}

GenericDescription TimeDependentDescription::project() const {
  std::vector<Assignment> pairs;
  pairs.reserve(triples_.size());
  for (const auto& t : triples_) pairs.push_back({t.n, t.x});
  return GenericDescription::from_pairs(pairs);
}

// ---- Enumerator -------------------------------------------------------------

Enumerator::Enumerator() = default;

Enumerator Enumerator::empty(unsigned tag) {
  Enumerator w;
  w.tag_ = tag;
  return w;
}

Enumerator Enumerator::scripted(unsigned tag, std::map<Stage, std::vector<Index>> script) {
  Enumerator w;
  w.tag_ = tag;
  for (auto& [stage, elems] : script) {
    w.script_[stage].insert(elems.begin(), elems.end());
  }
  return w;
}

Enumerator Enumerator::generated(unsigned tag, Additions additions) {
  Enumerator w;
  w.tag_ = tag;
  w.additions_ = std::move(additions);
  return w;
}

std::set<Index> Enumerator::at(Stage s) const {
  std::set<Index> out;
  if (additions_) {
    for (Stage t = 0; t <= s; ++t) {
      auto add = additions_(t);
      out.insert(add.begin(), add.end());
    }
    return out;
  }
  for (auto it = script_.begin(); it != script_.end() && it->first <= s; ++it) {
    out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

std::set<Index> enumerator_at(const Enumerator& w, Stage s) { return w.at(s); }

}  // namespace gencomp
