#include <random>

#include "doctest.h"
#include "gencomp/error.hpp"
#include "gencomp/reals.hpp"
#include "oracles.hpp"

using namespace gencomp;

namespace {

std::string first_bits(const RealSpec& x, int count) {
  std::string s;
  for (int n = 0; n < count; ++n) s += static_cast<char>('0' + x.bit(n));
  return s;
}

}  // namespace

TEST_CASE("periodic and explicit reals") {
  auto zeros = RealSpec::eventually_periodic({}, BitPrefix::parse("0"));
  CHECK(real_bit(zeros, 7) == 0);
  auto p = RealSpec::eventually_periodic(BitPrefix::parse("1"), BitPrefix::parse("10"));
  CHECK(real_bit(p, 0) == 1);
  CHECK(first_bits(p, 7) == "1101010");

  auto e = RealSpec::explicit_prefix(BitPrefix::parse("0110"));
  CHECK(e.hard_length() == std::optional<Index>(4));
  CHECK(e.bit(2) == 1);
  CHECK_THROWS_AS(e.bit(4), Error);
  try {
    e.bit(9);
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kRange);
  }
  CHECK_FALSE(p.hard_length().has_value());
  CHECK_THROWS_AS(RealSpec::eventually_periodic({}, {}), Error);
}

TEST_CASE("seeded reals follow the documented mixer") {
  CHECK(first_bits(RealSpec::seeded(0), 32) == "10010001010111110101111011001110");
  CHECK(first_bits(RealSpec::seeded(42), 32) == "10000101010011100001101100111111");
  CHECK(first_bits(RealSpec::seeded(0xDEADBEEF), 32) == "01000101001101100110110010100001");
  for (std::uint64_t seed : {1ULL, 7ULL, 123456789ULL}) {
    const auto x = RealSpec::seeded(seed);
    for (Index n = 0; n < 40; ++n) CHECK(x.bit(n) == oracle::seeded_bit(seed, n));
  }
}

TEST_CASE("bit evaluation is deterministic") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10'000; ++k) {
    const auto x = RealSpec::seeded(rng() % 64);
    const Index n = rng() % 5000;
    REQUIRE(x.bit(n) == x.bit(n));
    REQUIRE(x.bit(n) == real_bit(RealSpec::seeded(x.seed()), n));
  }
}

TEST_CASE("bit prefixes") {
  const auto b = BitPrefix::parse("0110");
  CHECK(b.size() == 4);
  CHECK(b.to_string() == "0110");
  CHECK(b.prefix(2).is_prefix_of(b));
  CHECK_FALSE(BitPrefix::parse("1").is_prefix_of(b));
  CHECK(b.common_prefix_length(BitPrefix::parse("0100")) == 2);
  CHECK(b.extended(1).to_string() == "01101");
  CHECK(BitPrefix{}.is_prefix_of(b));
  CHECK_THROWS_AS(BitPrefix::parse("012"), Error);
  CHECK_THROWS_AS(b.at(4), Error);
}

TEST_CASE("validate_description") {
  const auto zeros = RealSpec::zeros();
  std::vector<Assignment> lie{{2, 1}};
  const auto d1 = GenericDescription::from_pairs(lie);
  CHECK_FALSE(validate_description(d1, zeros, 8).truthful);
  CHECK(validate_description(d1, zeros, 8).first_conflict == std::optional<Index>(2));

  const auto x = RealSpec::seeded(3);
  std::vector<Assignment> full;
  for (Index n = 0; n < 8; ++n) full.push_back({n, x.bit(n)});
  const auto r2 = validate_description(GenericDescription::from_pairs(full), x, 8);
  CHECK(r2.truthful);
  CHECK(r2.density == Rational(1));

  std::vector<Assignment> evens;
  for (Index n = 0; n < 16; n += 2) evens.push_back({n, 0});
  const auto r3 = validate_description(GenericDescription::from_pairs(evens), zeros, 16);
  CHECK(r3.truthful);
  CHECK(r3.density == Rational(8, 16));
  CHECK(r3.density.numerator() == 1);  // stored normalized

  CHECK_THROWS_AS(validate_description(d1, zeros, 0), Error);
}

TEST_CASE("description truthfulness matches a bit-by-bit comparison") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = RealSpec::seeded(rng());
    const Index horizon = 1 + rng() % 200;
    std::vector<Assignment> pairs;
    bool lied = false;
    Index assigned = 0;
    for (Index n = 0; n < horizon + 20; ++n) {
      if (rng() % 3 == 0) continue;
      int bit = x.bit(n);
      if (rng() % 100 == 0) {
        bit ^= 1;
        lied = lied || n < horizon;
      }
      pairs.push_back({n, bit});
      assigned += n < horizon ? 1 : 0;
    }
    const auto r = validate_description(GenericDescription::from_pairs(pairs), x, horizon);
    CHECK(r.truthful == !lied);
    CHECK(r.density == Rational(static_cast<std::int64_t>(assigned), static_cast<std::int64_t>(horizon)));
  }
}

TEST_CASE("descriptions stay functional and truthful to an attached source") {
  std::vector<Assignment> both{{3, 0}, {3, 1}};
  CHECK_THROWS_AS(GenericDescription::from_pairs(both), Error);
  std::vector<Assignment> dup{{3, 1}, {3, 1}};
  CHECK(GenericDescription::from_pairs(dup).below(10).size() == 1);
  std::vector<Assignment> wrong{{0, 1}};
  CHECK_THROWS_AS(GenericDescription::from_pairs(wrong, RealSpec::zeros()), Error);
  try {
    GenericDescription::from_pairs(wrong, RealSpec::zeros());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCorruptDescription);
  }

  const auto lazy = GenericDescription::restricted([](Index n) { return static_cast<int>(n % 2); },
                                                   [](Index n) { return n % 3 != 0; });
  CHECK_FALSE(lazy.assigned(3));
  CHECK(lazy.lookup(5) == std::optional<int>(1));
  CHECK(lazy.below(6).size() == 4);
}

TEST_CASE("time-dependent descriptions project to generic ones") {
  TimeDependentDescription t({{4, 1, 2}, {4, 1, 0}, {1, 0, 5}});
  CHECK(t.triples().size() == 3);
  const auto d = t.project();
  CHECK(d.lookup(4) == std::optional<int>(1));
  CHECK(d.lookup(1) == std::optional<int>(0));
  CHECK_FALSE(d.assigned(2));
  TimeDependentDescription bad({{4, 1, 2}, {4, 0, 3}});
  CHECK_THROWS_AS(bad.project(), Error);
}

TEST_CASE("enumerators") {
  CHECK(enumerator_at(Enumerator::empty(), 10).empty());
  const auto w = Enumerator::scripted(0, {{0, {}}, {1, {2}}});
  CHECK(enumerator_at(w, 1) == std::set<Index>{2});
  CHECK(enumerator_at(w, 5) == std::set<Index>{2});
  CHECK(enumerator_at(w, 0).empty());
  CHECK(w.script() != nullptr);

  const auto g = Enumerator::generated(3, [](Stage s) { return std::vector<Index>{2 * s}; });
  CHECK(g.tag() == 3);
  CHECK(g.at(3) == std::set<Index>{0, 2, 4, 6});
  CHECK(g.script() == nullptr);
}

TEST_CASE("scripted enumerators are monotone") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    std::map<Stage, std::vector<Index>> script;
    for (int k = 0; k < 40; ++k) script[static_cast<Stage>(rng() % 50)].push_back(rng() % 1000);
    const auto w = Enumerator::scripted(0, script);
    for (Stage s = 0; s < 50; ++s) {
      const auto a = w.at(s);
      for (Stage t = s + 1; t <= 50; t += 7) {
        const auto b = w.at(t);
        REQUIRE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
      }
    }
  }
}
