#include <random>

#include "doctest.h"
#include "gencomp/codings.hpp"
#include "gencomp/enumops.hpp"
#include "gencomp/error.hpp"

using namespace gencomp;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kInternalConsistency;
}

// Everything phi emits over every order and labelling of `pairs`, by plain
// recursion on which pair is read next.
void oracle_orderings(const FunctionalSpec& phi, const std::vector<Assignment>& pairs, Index max_label,
                      std::vector<Triple>& seq, std::vector<bool>& used, std::set<Assignment>& out) {
  if (seq.size() >= phi.use_bound) return;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (used[k]) continue;
    used[k] = true;
    for (Index l = 0; l <= max_label; ++l) {
      seq.push_back({pairs[k].n, pairs[k].x, l});
      for (const auto& a : phi.on_read(seq)) out.insert(a);
      oracle_orderings(phi, pairs, max_label, seq, used, out);
      seq.pop_back();
    }
    used[k] = false;
  }
}

std::set<Assignment> oracle_outputs(const FunctionalSpec& phi, const FiniteAssignment& d, Index max_label) {
  std::vector<Triple> seq;
  std::vector<bool> used(d.size(), false);
  std::set<Assignment> out;
  oracle_orderings(phi, d.pairs(), max_label, seq, used, out);
  return out;
}

// Every functional assignment on indices below `bound`.
std::vector<FiniteAssignment> all_assignments(Index bound) {
  std::vector<FiniteAssignment> out;
  std::size_t total = 1;
  for (Index n = 0; n < bound; ++n) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<Assignment> pairs;
    std::size_t c = code;
    for (Index n = 0; n < bound; ++n, c /= 3) {
      if (c % 3) pairs.push_back({n, static_cast<int>(c % 3 - 1)});
    }
    out.emplace_back(pairs);
  }
  return out;
}

}  // namespace

TEST_CASE("pair codes") {
  CHECK(encode_pair(3, 1) == 7);
  CHECK(encode_pair(3, 0) == 6);
  CHECK(decode_pair(7).n == 3);
  CHECK(decode_pair(7).x == 1);
  for (Index c = 0; c < 100; ++c) REQUIRE(encode_pair(decode_pair(c).n, decode_pair(c).x) == c);
}

TEST_CASE("apply_operator examples") {
  const EnumerationOperator five(std::vector<Axiom>{{5, {}}});
  CHECK(apply_operator(five, BoundedSet::of({}, 10)) == std::set<Index>{5});
  const EnumerationOperator seven(std::vector<Axiom>{{7, {2, 4}}});
  CHECK(apply_operator(seven, BoundedSet::of({2}, 10)).empty());
  CHECK(apply_operator(seven, BoundedSet::of({2, 4, 9}, 10)) == std::set<Index>{7});
  CHECK(kind_of([&] { apply_operator(seven, BoundedSet::of({2, 4}, 4)); }) == ErrorKind::kInsufficientOracle);
  CHECK(seven.derives(7, std::vector<Index>{1, 2, 4}));
  CHECK_FALSE(seven.derives(7, std::vector<Index>{4}));
}

TEST_CASE("monotonicity and finite support") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Axiom> axioms;
    for (int k = 0; k < 8; ++k) {
      Axiom a{rng() % 10, {}};
      for (int j = rng() % 4; j > 0; --j) a.premise.push_back(rng() % 12);
      axioms.push_back(a);
    }
    const EnumerationOperator w(axioms);
    std::set<Index> small, big;
    for (Index n = 0; n < 12; ++n) {
      const auto r = rng() % 3;
      if (r == 0) small.insert(n);
      if (r <= 1) big.insert(n);
    }
    const auto a = apply_operator(w, BoundedSet::of(small, 12));
    const auto b = apply_operator(w, BoundedSet::of(big, 12));
    REQUIRE(std::includes(b.begin(), b.end(), a.begin(), a.end()));

    // Union over all finite subsets of `big` (it has at most 12 elements).
    const std::vector<Index> elems(big.begin(), big.end());
    std::set<Index> joined;
    for (std::size_t mask = 0; mask < (std::size_t{1} << elems.size()); ++mask) {
      std::set<Index> sub;
      for (std::size_t k = 0; k < elems.size(); ++k)
        if (mask >> k & 1) sub.insert(elems[k]);
      for (Index o : apply_operator(w, BoundedSet::of(sub, 12))) joined.insert(o);
    }
    REQUIRE(joined == b);
  }
}

TEST_CASE("positive-only application ignores negative entries") {
  const EnumerationOperator w(std::vector<Axiom>{{1, {6}}, {2, {7}}, {3, {}}});
  const FiniteAssignment d(std::vector<Assignment>{{3, 0}});
  CHECK(apply_to_assignment(w, d) == std::set<Assignment>{{0, 1}, {1, 1}});
  ApplyOptions strict;
  strict.positive_only = true;
  CHECK(apply_to_assignment(w, d, strict) == std::set<Assignment>{{1, 1}});
  const FiniteAssignment pos(std::vector<Assignment>{{3, 1}});
  CHECK(apply_to_assignment(w, pos, strict) == std::set<Assignment>{{1, 0}, {1, 1}});
}

TEST_CASE("finite assignments are functional") {
  CHECK(kind_of([] { FiniteAssignment(std::vector<Assignment>{{1, 0}, {1, 1}}); }) == ErrorKind::kCorruptDescription);
  CHECK(FiniteAssignment(std::vector<Assignment>{{2, 1}, {0, 0}, {2, 1}}).size() == 2);
  CHECK(FiniteAssignment(std::vector<Assignment>{{2, 1}, {0, 0}}).codes() == std::vector<Index>{0, 5});
}

TEST_CASE("compiling the echo functional") {
  const auto echo = *functional_by_name("echo");
  CompileBounds b;
  b.element_bound = 4;
  const auto w = functional_to_operator(echo, b);
  for (Index n = 0; n < 4; ++n) {
    for (int x = 0; x <= 1; ++x) {
      const Index code = encode_pair(n, x);
      REQUIRE(w.derives(code, std::vector<Index>{code}));
      REQUIRE_FALSE(w.derives(code, std::vector<Index>{}));
    }
  }
}

TEST_CASE("compiling keeps any ordering that works") {
  const auto op = *functional_by_name("ordered-pair");
  CompileBounds b;
  b.element_bound = 3;
  const auto w = functional_to_operator(op, b);
  const std::vector<Index> both{encode_pair(1, 1), encode_pair(2, 1)};
  CHECK(w.derives(encode_pair(0, 1), both));
  CHECK_FALSE(w.derives(encode_pair(0, 1), std::vector<Index>{encode_pair(2, 1)}));
  // Reading <2,1> first emits nothing, yet the other order does.
  const std::vector<Triple> wrong{{2, 1, 0}, {1, 1, 0}};
  CHECK(run_functional(op, wrong).empty());

  const auto silent = *functional_by_name("silent");
  CHECK(functional_to_operator(silent, b).axioms().empty());
}

TEST_CASE("compile budget") {
  CompileBounds b;
  b.element_bound = 5;
  b.budget = 1000;
  CHECK(kind_of([&] { functional_to_operator(*functional_by_name("echo"), b); }) == ErrorKind::kBudget);
}

TEST_CASE("operator equals the union over orderings") {
  CompileBounds b;
  b.element_bound = 4;
  b.max_label = 3;
  const auto descriptions = all_assignments(4);
  CHECK(descriptions.size() == 81);
  for (const auto& phi : functional_battery()) {
    CAPTURE(phi.name);
    const auto w = functional_to_operator(phi, b);
    for (const auto& d : descriptions) {
      const auto expect = oracle_outputs(phi, d, b.max_label);
      REQUIRE(outputs_over_orderings(phi, d, b.max_label) == expect);
      REQUIRE(apply_to_assignment(w, d) == expect);
    }
  }
}

TEST_CASE("no false bits survive compilation") {
  // A functional that never lies about X over any ordering yields an operator
  // that never lies on truthful descriptions of X.
  CompileBounds b;
  b.element_bound = 4;
  const auto x = CodedReal::r_of(RealSpec::seeded(8));
  std::vector<FiniteAssignment> truthful;
  for (const auto& d : all_assignments(4)) {
    bool ok = true;
    for (const auto& p : d.pairs()) ok = ok && p.n >= 1 && x.bit(p.n) == p.x;
    if (ok) truthful.push_back(d);
  }
  auto true_of_x = [&](const Assignment& a) { return a.n >= 1 && x.bit(a.n) == a.x; };
  int honest = 0;
  for (const auto& phi : functional_battery()) {
    if (phi.name == "valuation-decoder") continue;  // it speaks about a different real
    bool never_lies = true;
    for (const auto& d : truthful)
      for (const auto& a : oracle_outputs(phi, d, b.max_label)) never_lies = never_lies && true_of_x(a);
    if (!never_lies) continue;
    ++honest;
    const auto w = functional_to_operator(phi, b);
    for (const auto& d : truthful)
      for (const auto& a : apply_to_assignment(w, d)) REQUIRE(true_of_x(a));
  }
  CHECK(honest >= 4);  // echo, silent, early-labels, first-read

  // label-liar lies at late labels, and the operator inherits the lie.
  const auto liar = functional_to_operator(*functional_by_name("label-liar"), b);
  const FiniteAssignment one(std::vector<Assignment>{{1, x.bit(1)}});
  CHECK(apply_to_assignment(liar, one).count({1, 1 - x.bit(1)}) == 1);
}

TEST_CASE("enumeration to generic computation") {
  CHECK(generic_computation_from_subset_enumeration(Enumerator::empty(), RealSpec::zeros(), 5).empty());
  const auto evens = Enumerator::generated(0, [](Stage s) { return std::vector<Index>{2 * s}; });
  const BitSource is_even = [](Index n) { return static_cast<int>(n % 2 == 0); };
  const auto phi = generic_computation_from_subset_enumeration(evens, is_even, 4);
  CHECK(phi == PartialMap{{0, 1}, {2, 1}, {4, 1}, {6, 1}, {8, 1}});
  const auto two = Enumerator::scripted(0, {{0, {2}}});
  CHECK(kind_of([&] { generic_computation_from_subset_enumeration(two, RealSpec::zeros(), 1); }) ==
        ErrorKind::kFalsifiedPremise);
}

TEST_CASE("generic computation to enumeration") {
  const BitSource is_even = [](Index n) { return static_cast<int>(n % 2 == 0); };
  std::vector<Triple> zeros{{1, 0, 0}, {3, 0, 2}};
  CHECK(subset_enumeration_from_generic_computation(zeros, is_even).at(10).empty());

  std::vector<Triple> run;
  for (Index n = 0; n < 32; n += 2) run.push_back({n, 1, n});
  const auto y = subset_enumeration_from_generic_computation(run, is_even);
  std::set<Index> expect;
  for (Index n = 0; n < 32; n += 2) expect.insert(n);
  CHECK(y.at(40) == expect);
  CHECK(y.at(4) == std::set<Index>{0, 2, 4});

  std::vector<Triple> lie{{1, 1, 0}};
  CHECK(kind_of([&] { subset_enumeration_from_generic_computation(lie, is_even); }) ==
        ErrorKind::kFalsifiedPremise);
}

TEST_CASE("random truthful runs give subsets with the density bound") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = RealSpec::seeded(rng());
    const BitSource src = [&](Index n) { return x.bit(n); };
    const Index horizon = 64 + rng() % 200;
    std::vector<Triple> run;
    std::vector<bool> in_domain(horizon, false);
    for (Index n = 0; n < horizon; ++n) {
      if (rng() % 4 == 0) continue;
      run.push_back({n, x.bit(n), rng() % 20});
      in_domain[n] = true;
    }
    const auto members = subset_enumeration_from_generic_computation(run, src).at(20);
    std::int64_t dom = 0, xs = 0, ys = 0;
    for (Index n = 0; n < horizon; ++n) {
      dom += in_domain[n];
      xs += x.bit(n);
      const bool in_y = members.count(n) > 0;
      ys += in_y;
      REQUIRE((!in_y || x.bit(n) == 1));
      REQUIRE(in_y == (in_domain[n] && x.bit(n) == 1));
    }
    REQUIRE(ys >= dom + xs - static_cast<std::int64_t>(horizon));
  }
}
